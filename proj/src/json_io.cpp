#include "remodel/json_io.hpp"
#include <json.hpp>
#include <fstream>
#include <sstream>

namespace remodel {

using nlohmann::json;

static StackyFan3 from_json(const json& j) {
    StackyFan3 fan;
    if (!j.contains("rays") || !j["rays"].is_array()) throw parse_error("fan file: missing \"rays\" array");
    for (auto& r : j["rays"]) {
        if (!r.is_array() || r.size() != 2) throw parse_error("fan file: each ray must be [m,n]");
        fan.rays.push_back(Vec2l(r[0].get<long>(), r[1].get<long>()));
    }
    if (j.contains("extra"))
        for (auto& r : j["extra"]) {
            if (!r.is_array() || r.size() != 2) throw parse_error("fan file: each extra vector must be [m,n]");
            fan.extra.push_back(Vec2l(r[0].get<long>(), r[1].get<long>()));
        }
    if (!j.contains("cones3") || !j["cones3"].is_array()) throw parse_error("fan file: missing \"cones3\" array");
    for (auto& c : j["cones3"]) {
        if (!c.is_array() || c.size() != 3) throw parse_error("fan file: each cone must be [i,j,k]");
        fan.cones.push_back(Cone3{c[0].get<int>(), c[1].get<int>(), c[2].get<int>()});
    }
    if (j.contains("preferred_flag")) {
        auto& p = j["preferred_flag"];
        if (!p.contains("sigma") || !p.contains("tau")) throw parse_error("fan file: preferred_flag needs sigma and tau");
        auto s = p["sigma"], t = p["tau"];
        if (s.size() != 3 || t.size() != 2) throw parse_error("fan file: preferred_flag shape");
        fan.preferred_sigma = {s[0].get<int>(), s[1].get<int>(), s[2].get<int>()};
        fan.preferred_tau = {t[0].get<int>(), t[1].get<int>()};
    }
    return fan;
}

StackyFan3 parse_fan(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("fan file: ") + e.what());
    }
    return from_json(j);
}

StackyFan3 load_fan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open fan file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_fan(ss.str());
}

std::string fan_to_json(const StackyFan3& fan) {
    json j;
    j["rays"] = json::array();
    for (auto& r : fan.rays) j["rays"].push_back({r[0], r[1]});
    j["extra"] = json::array();
    for (auto& e : fan.extra) j["extra"].push_back({e[0], e[1]});
    j["cones3"] = json::array();
    for (auto& c : fan.cones) j["cones3"].push_back({c[0], c[1], c[2]});
    if (fan.preferred_sigma[0] != 0) {
        j["preferred_flag"]["sigma"] = {fan.preferred_sigma[0], fan.preferred_sigma[1], fan.preferred_sigma[2]};
        j["preferred_flag"]["tau"] = {fan.preferred_tau[0], fan.preferred_tau[1]};
    }
    return j.dump();
}

std::string fan_hash(const StackyFan3& fan) {
    std::string s = fan_to_json(fan);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

} // namespace remodel
