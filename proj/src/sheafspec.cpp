#include "remodel/sheafspec.hpp"
#include <cctype>

namespace remodel {

namespace {

struct Cursor {
    const std::string& s;
    size_t i = 0;

    void skip() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) { ++i; return true; }
        return false;
    }
    void expect(char c, const char* what) {
        if (!eat(c)) throw sheaf_parse_error(std::string("expected '") + c + "' " + what, i);
    }
    bool eat_word(const char* word) {
        skip();
        size_t j = i;
        for (const char* p = word; *p; ++p, ++j)
            if (j >= s.size() || std::tolower((unsigned char)s[j]) != *p) return false;
        i = j;
        return true;
    }
    long integer() {
        skip();
        size_t start = i;
        bool neg = false;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) { neg = s[i] == '-'; ++i; }
        if (i >= s.size() || !std::isdigit((unsigned char)s[i]))
            throw sheaf_parse_error("expected an integer", start);
        long v = 0;
        while (i < s.size() && std::isdigit((unsigned char)s[i])) v = 10 * v + (s[i++] - '0');
        return neg ? -v : v;
    }
    void end() {
        skip();
        if (i != s.size()) throw sheaf_parse_error("unexpected trailing input", i);
    }
};

} // namespace

SheafSpec parse_sheaf(const std::string& text) {
    Cursor c{text};
    SheafSpec spec;
    if (!c.eat_word("o")) throw sheaf_parse_error("sheaf spec must start with O(", c.i);
    c.expect('(', "after O");
    if (!c.eat_word("v")) throw sheaf_parse_error("expected V", c.i);
    c.expect(':', "after V");
    c.skip();
    if (c.eat_word("d")) {
        spec.kind = SheafSpec::divisor;
        spec.indices.push_back((int)c.integer());
    } else if (c.eat_word("l")) {
        spec.kind = SheafSpec::curve;
        c.expect('{', "after l");
        spec.indices.push_back((int)c.integer());
        c.expect(',', "between curve indices");
        spec.indices.push_back((int)c.integer());
        c.expect('}', "closing the curve indices");
    } else if (c.eat_word("p")) {
        spec.kind = SheafSpec::point;
        c.expect('{', "after p");
        spec.indices.push_back((int)c.integer());
        c.expect(',', "between point indices");
        spec.indices.push_back((int)c.integer());
        c.expect(',', "between point indices");
        spec.indices.push_back((int)c.integer());
        c.expect('}', "closing the point indices");
    } else {
        throw sheaf_parse_error("expected one of d, l{..}, p{..}", c.i);
    }
    c.expect(')', "closing O(...)");
    if (c.eat('*')) {
        if (!c.eat_word("tw")) throw sheaf_parse_error("expected tw(...) after *", c.i);
        c.expect('(', "after tw");
        spec.twist.push_back(c.integer());
        while (c.eat(',')) spec.twist.push_back(c.integer());
        c.expect(')', "closing tw(...)");
    }
    c.end();
    return spec;
}

KClass SheafSpec::realize(const StackyFan3& fan) const {
    KClass k;
    switch (kind) {
        case divisor: k = divisor_class(fan, indices[0]); break;
        case curve: k = curve_class(fan, Cone2{indices[0], indices[1]}); break;
        case point: {
            Cone3 sigma{indices[0], indices[1], indices[2]};
            (void)cone_index(fan, sigma); // validates
            k = point_class(fan, sigma);
            break;
        }
    }
    if (!twist.empty()) {
        std::vector<long> r(fan.num_rays(), 0);
        if ((long)twist.size() > fan.num_rays())
            throw sheaf_parse_error("twist vector longer than the number of rays", 0);
        for (size_t i = 0; i < twist.size(); ++i) r[i] = twist[i];
        k = k.twisted(r);
    }
    return k;
}

} // namespace remodel
