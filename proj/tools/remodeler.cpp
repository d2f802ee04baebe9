// batch front door: fan inspection, central charges, A/B comparison, GKZ
// reports, topological recursion and graph sums
#include <CLI11.hpp>
#include <json.hpp>

#include "remodel/json_io.hpp"
#include "remodel/sheafspec.hpp"
#include "remodel/mirrorcurve.hpp"
#include "remodel/graphsum.hpp"
#include "remodel/limitr.hpp"
#include "remodel/zcheck.hpp"

#include <fstream>
#include <iostream>

using namespace remodel;
using nlohmann::json;

namespace {

constexpr int EXIT_VALIDATION = 2;
constexpr int EXIT_TOLERANCE = 3;
constexpr int EXIT_PARSE = 4;

struct Options {
    std::string fan_path, curve_path, out_path, golden_path, sheaf, format = "json";
    long order = 8;
    std::pair<double, double> u1{1.0, 0.0}, u2{0.7, 0.0}, zz{0.3, 0.0};
    std::vector<std::string> qspec;
    std::vector<long> cochar{2, 1};
    long g = 0, n = 1;
    bool nonequiv = false, char_sum = false, check_recursion = false, trace = false;
};

cplx as_c(std::pair<double, double> p) { return cplx(p.first, p.second); }

struct Loaded {
    StackyFan3 fan;
    DivisorLattice lat;
    EquivWeights w;
};

Loaded load(const Options& opt) {
    Loaded L;
    L.fan = canonicalize(load_fan(opt.fan_path));
    auto rep = validate_fan(L.fan);
    if (!rep.ok()) throw fan_error("fan validation failed: " + rep.first_failure());
    L.lat = nef_basis(L.fan);
    L.w = equiv_weights(L.fan, L.lat);
    return L;
}

std::vector<cplx> parse_q(const Options& opt, long p) {
    std::vector<cplx> q(p, cplx(1e-3, 0));
    for (auto& item : opt.qspec) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw parse_error("bad --q entry (want a=value): " + item);
        long a = std::stol(item.substr(0, eq));
        double v = std::stod(item.substr(eq + 1));
        if (a < 1 || a > p) throw parse_error("--q index out of range: " + item);
        q[a - 1] = cplx(v, 0);
    }
    return q;
}

json metadata(const Loaded& L) {
    json m;
    m["fan_hash"] = fan_hash(L.fan);
    auto f0 = preferred_flag(L.fan);
    m["preferred_flag"] = {{"sigma", {f0.sigma[0], f0.sigma[1], f0.sigma[2]}},
                           {"tau", {f0.tau[0], f0.tau[1]}},
                           {"frame", {{"r", f0.r}, {"s", f0.s}, {"m", f0.m}}}};
    json hs = json::array();
    for (auto& h : L.lat.nef) hs.push_back(h);
    m["nef_basis"] = hs;
    m["gamma_strip"] = "constant parts normalized to (0,1]";
    m["branch_convention"] = "principal logs pinned at the cycle anchors; windings tracked as integers";
    return m;
}

void emit(const Options& opt, const json& report, const std::string& csv) {
    std::string text = opt.format == "csv" && !csv.empty() ? csv : report.dump(2) + "\n";
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opt.out_path);
        out << text;
    }
}

// ---------------------------------------------------------------------------

int cmd_inspect(const Options& opt) {
    StackyFan3 raw = load_fan(opt.fan_path);
    auto rep = validate_fan(raw);
    json j;
    j["checks"] = json::array();
    for (auto& c : rep.checks) j["checks"].push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
    if (!rep.ok()) {
        std::cout << j.dump(2) << "\n";
        std::cerr << "fan validation failed: " << rep.first_failure() << "\n";
        return EXIT_VALIDATION;
    }
    Loaded L = load(opt);
    auto st = polytope_stats(L.fan);
    j["metadata"] = metadata(L);
    j["stats"] = {{"g", st.interior}, {"n", st.boundary}, {"p", st.p}, {"p_prime", st.p_prime}};
    j["cones"] = json::array();
    for (auto& sigma : L.fan.cones) {
        json cj;
        cj["rays"] = {sigma[0], sigma[1], sigma[2]};
        cj["stabilizer_order"] = stabilizer_order(L.fan, sigma);
        cj["box"] = json::array();
        for (auto& el : box_elements(L.fan, sigma)) {
            json bj;
            bj["v"] = {el.v[0], el.v[1], el.v[2]};
            bj["age"] = rat_str(el.age);
            json cs = json::array();
            for (auto& [i, c] : el.coeff) cs.push_back({{"i", i}, {"c", rat_str(c)}});
            bj["coeffs"] = cs;
            cj["box"].push_back(bj);
        }
        j["cones"].push_back(cj);
    }
    j["flags"] = json::array();
    for (auto& [tau, parents] : two_cones(L.fan))
        for (auto& sigma : parents) {
            auto f = flag_frame(L.fan, tau, sigma);
            j["flags"].push_back({{"tau", {tau[0], tau[1]}},
                                  {"sigma", {sigma[0], sigma[1], sigma[2]}},
                                  {"ordered", {f.ordered[0], f.ordered[1], f.ordered[2]}},
                                  {"r", f.r},
                                  {"s", f.s},
                                  {"m", f.m}});
        }
    j["weights_csv"] = weights_csv(L.fan, L.w);
    emit(opt, j, weights_csv(L.fan, L.w));
    return 0;
}

int cmd_charge(const Options& opt) {
    Loaded L = load(opt);
    SheafSpec spec = parse_sheaf(opt.sheaf);
    KClass cls = spec.realize(L.fan);
    Cocharacter v{opt.cochar[0], opt.cochar[1]};
    auto cl = classify_support(L.fan, L.w, v);
    // support admission
    ConeKey key = cls.word[0].I;
    const char* need = opt.nonequiv ? "compact" : "plus";
    Support sup = opt.nonequiv ? Support::compact : Support::plus;
    if (!cl.in(sup, key)) {
        std::cerr << "sheaf support {";
        for (int i : key) std::cerr << i << ",";
        std::cerr << "} is not in Sigma^" << need << " for cocharacter (" << v.a << "," << v.b
                  << "); see classify_support\n";
        return EXIT_VALIDATION;
    }
    if (opt.char_sum && spec.kind == SheafSpec::point)
        cls = point_class_summed(L.fan, Cone3{spec.indices[0], spec.indices[1], spec.indices[2]});
    auto fr = frame(L.fan, L.w, cls);
    if (opt.nonequiv) fr = nonequiv_limit(L.fan, fr);
    auto Z = central_charge(L.fan, L.lat, L.w, fr.a, opt.order);

    json j;
    j["metadata"] = metadata(L);
    j["sheaf"] = opt.sheaf;
    j["coefficients"] = json::array();
    for (auto& [k, av] : Z.comps) {
        json row;
        auto& sigma = L.fan.cones[k.cone];
        row["sigma"] = {sigma[0], sigma[1], sigma[2]};
        row["box"] = k.box;
        row["a"] = av.first.str();
        j["coefficients"].push_back(row);
    }
    auto q = parse_q(opt, L.lat.p);
    std::ostringstream csv;
    csv << "u1_re,u1_im,u2_re,u2_im,z_re,z_im,value_re,value_im\n";
    json grid = json::array();
    for (int s = 0; s < 5; ++s) {
        double f = 1.0 + 0.07 * s;
        cplx u1 = as_c(opt.u1) * f, u2 = as_c(opt.u2) * f, z = as_c(opt.zz);
        if (opt.nonequiv) u1 = u2 = 0; // limit already taken; evaluation is u-free
        cplx val = Z.eval(u1, u2, z, q);
        grid.push_back({{"u1", {u1.real(), u1.imag()}},
                        {"u2", {u2.real(), u2.imag()}},
                        {"z", {z.real(), z.imag()}},
                        {"value", {val.real(), val.imag()}}});
        csv << u1.real() << "," << u1.imag() << "," << u2.real() << "," << u2.imag() << "," << z.real()
            << "," << z.imag() << "," << val.real() << "," << val.imag() << "\n";
    }
    j["grid"] = grid;
    emit(opt, j, csv.str());
    return 0;
}

int cmd_compare01(const Options& opt) {
    Loaded L = load(opt);
    Cocharacter v{opt.cochar[0], opt.cochar[1]};
    auto cl = classify_support(L.fan, L.w, v);
    // chamber compatibility: Re(u) must sit in the same chamber as v
    for (auto& [tau, parents] : two_cones(L.fan))
        for (auto& sigma : parents) {
            auto f = flag_frame(L.fan, tau, sigma);
            int k = cone_index(L.fan, sigma);
            const LinForm& w1 = L.w.w(k, f.ordered[0]);
            double up = to_double(w1.a) * opt.u1.first + to_double(w1.b) * opt.u2.first;
            Rat vp = v.pair(w1);
            if ((vp > 0) != (up > 0)) {
                std::cerr << "chamber mismatch: Re(u) and the cocharacter lie on opposite sides of the "
                             "wall dual to the curve of flag tau={"
                          << tau[0] << "," << tau[1] << "} sigma={" << sigma[0] << "," << sigma[1] << ","
                          << sigma[2] << "}\n";
                return EXIT_VALIDATION;
            }
        }

    auto q = parse_q(opt, L.lat.p);
    json j;
    j["metadata"] = metadata(L);
    j["rows"] = json::array();
    std::ostringstream csv;
    csv << "cycle_id,u1,u2,z,value_re,value_im,closed_form_re,closed_form_im,rel_err\n";
    bool all_ok = true;
    const double tpi = 2 * 3.14159265358979323846;

    auto add_rows = [&](const std::string& id, const KClass& gen) {
        auto pc = mirror_cycle(L.fan, L.w, cl, gen);
        auto fr = frame(L.fan, L.w, gen);
        auto Z = central_charge(L.fan, L.lat, L.w, fr.a, opt.order);
        for (int s = 0; s < 5; ++s) {
            double f = 1.0 + 0.06 * s;
            cplx u1 = as_c(opt.u1) * f, u2 = as_c(opt.u2) * f, z = as_c(opt.zz);
            auto r = patched_integral(L.fan, L.lat, L.w, q, pc, u1, u2, z);
            cplx lhs = cplx(0, tpi) * r.value;
            cplx rhs = Z.eval(u1, u2, z, q);
            double rel = std::abs(lhs - rhs) / std::max(1e-300, std::abs(rhs));
            bool ok = rel <= 1e-8;
            all_ok = all_ok && ok;
            j["rows"].push_back({{"cycle", id},
                                 {"u1", u1.real()},
                                 {"u2", u2.real()},
                                 {"z", z.real()},
                                 {"quadrature", {lhs.real(), lhs.imag()}},
                                 {"central_charge", {rhs.real(), rhs.imag()}},
                                 {"rel_err", rel},
                                 {"pass", ok}});
            csv << id << "," << u1.real() << "," << u2.real() << "," << z.real() << "," << lhs.real()
                << "," << lhs.imag() << "," << rhs.real() << "," << rhs.imag() << "," << rel << "\n";
        }
    };

    int idn = 0;
    for (auto& gen : kgroup_generators(L.fan, cl, Support::plus))
        add_rows("plus_gen_" + std::to_string(idn++), gen);
    for (auto& gen : kgroup_generators(L.fan, cl, Support::compact)) {
        if (gen.word[0].I.size() == 3) continue; // point classes are handled by charge --nonequiv
        add_rows("compact_gen_" + std::to_string(idn++), gen);
    }
    j["all_pass"] = all_ok;
    emit(opt, j, csv.str());
    return all_ok ? 0 : EXIT_TOLERANCE;
}

json series_json(const LogSeries& s) {
    json j;
    j["shift"] = json::array();
    for (auto& f : s.shift) j["shift"].push_back({rat_str(f.a), rat_str(f.b)});
    j["terms"] = json::array();
    for (auto& [e, ms] : s.terms)
        for (auto& [mask, c] : ms) {
            json t;
            t["beta_deg"] = json::array();
            for (auto& x : e.e) t["beta_deg"].push_back(rat_str(x));
            t["coeff_num"] = c.num.str();
            std::string den;
            for (auto& [f, m] : c.den) {
                den += "(" + to_string(f) + ")";
                if (m > 1) den += "^" + std::to_string(m);
            }
            t["coeff_den"] = den.empty() ? "1" : den;
            bool logs = false;
            for (auto b : mask) logs |= b > 0;
            if (logs) t["logs"] = mask;
            j["terms"].push_back(t);
        }
    return j;
}

int cmd_gkz(const Options& opt) {
    Loaded L = load(opt);
    auto betas = gkz_test_set(L.lat);
    json j;
    j["metadata"] = metadata(L);
    j["rows"] = json::array();
    bool all_zero = true;
    json series_dump = json::array();
    for (auto& sigma : L.fan.cones) {
        auto box = box_elements(L.fan, sigma);
        for (size_t kb = 0; kb < box.size(); ++kb) {
            auto I = i_component(L.fan, L.lat, L.w, sigma, box[kb], opt.order);
            series_dump.push_back(series_json(I));
            for (size_t bi = 0; bi < betas.size(); ++bi) {
                auto r = gkz_apply(L.fan, L.lat, betas[bi], I);
                bool zero = r.is_zero();
                all_zero = all_zero && zero;
                j["rows"].push_back({{"sigma", {sigma[0], sigma[1], sigma[2]}},
                                     {"box", kb},
                                     {"beta", betas[bi]},
                                     {"order", rat_str(r.order)},
                                     {"zero", zero}});
            }
            bool ez = euler_apply(I).is_zero();
            all_zero = all_zero && ez;
            j["rows"].push_back(
                {{"sigma", {sigma[0], sigma[1], sigma[2]}}, {"box", kb}, {"operator", "E"}, {"zero", ez}});
        }
    }
    j["series"] = series_dump;
    j["all_zero"] = all_zero;
    if (!opt.golden_path.empty()) {
        std::ifstream in(opt.golden_path);
        if (!in) {
            std::cerr << "cannot open golden file: " << opt.golden_path << "\n";
            return EXIT_PARSE;
        }
        json golden = json::parse(in, nullptr, false);
        if (golden.is_discarded() || golden != series_dump) {
            std::cerr << "golden mismatch against " << opt.golden_path << "\n";
            return EXIT_TOLERANCE;
        }
        j["golden"] = "match";
    }
    emit(opt, j, "");
    return all_zero ? 0 : EXIT_TOLERANCE;
}

json omega_json(const OmegaTensor& w) {
    json j;
    j["g"] = w.g;
    j["n"] = w.n;
    j["terms"] = json::array();
    for (auto& [key, val] : w.T) {
        json t;
        t["profile"] = json::array();
        for (auto& p : key) t["profile"].push_back({p.a, p.k});
        t["coeff"] = rat_str(val);
        j["terms"].push_back(t);
    }
    return j;
}

int cmd_tr(const Options& opt) {
    auto curve = load_spectral(opt.curve_path);
    auto cd = analyze_curve(curve, 6 * opt.g + 2 * opt.n + 12);
    auto& w = omega(cd, opt.g, opt.n);
    json j = omega_json(w);
    j["branch_points"] = json::array();
    for (auto& t : cd.tb) j["branch_points"].push_back(rat_str(t));
    if (!opt.golden_path.empty()) {
        std::ifstream in(opt.golden_path);
        if (!in) {
            std::cerr << "cannot open golden file: " << opt.golden_path << "\n";
            return EXIT_PARSE;
        }
        json golden = json::parse(in, nullptr, false);
        if (golden.is_discarded() || golden != j) {
            std::cerr << "golden mismatch against " << opt.golden_path << "\n";
            return EXIT_TOLERANCE;
        }
    }
    emit(opt, j, "");
    return 0;
}

int cmd_graphsum(const Options& opt) {
    auto curve = load_spectral(opt.curve_path);
    auto cd = analyze_curve(curve, 6 * opt.g + 2 * opt.n + 12);
    std::vector<GraphTraceRow> trace;
    auto gs = graph_sum_B(cd, opt.g, opt.n, opt.trace ? &trace : nullptr);
    json j = omega_json(gs);
    if (opt.trace) {
        j["trace"] = json::array();
        for (auto& row : trace) {
            j["trace"].push_back({{"graph", row.signature}, {"weight", row.weight}});
            std::cerr << row.signature << "  " << row.weight << "\n";
        }
    }
    if (opt.check_recursion) {
        auto& w = omega(cd, opt.g, opt.n);
        bool same = gs == w;
        j["matches_recursion"] = same;
        emit(opt, j, "");
        return same ? 0 : EXIT_TOLERANCE;
    }
    emit(opt, j, "");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"toolkit for toric Calabi-Yau 3-orbifold mirror symmetry computations"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--fan", opt.fan_path, "fan JSON file");
        c->add_option("--order", opt.order, "q-series truncation order");
        c->add_option("--u1", opt.u1, "u1 as re,im")->delimiter(',');
        c->add_option("--u2", opt.u2, "u2 as re,im")->delimiter(',');
        c->add_option("--z", opt.zz, "z as re,im")->delimiter(',');
        c->add_option("--q", opt.qspec, "q values as a=val,...")->delimiter(',');
        c->add_option("--cochar", opt.cochar, "cocharacter a,b")->delimiter(',')->expected(2);
        c->add_option("--out", opt.out_path, "output path (default stdout)");
        c->add_option("--format", opt.format, "json|csv");
        c->add_option("--golden", opt.golden_path, "golden file for regression compare");
    };

    auto* inspect = app.add_subcommand("inspect", "validate a fan and print its combinatorics");
    inspect->add_option("fanfile", opt.fan_path, "fan JSON file");
    add_common(inspect);

    auto* charge = app.add_subcommand("charge", "central charge of a sheaf");
    add_common(charge);
    charge->add_option("--sheaf", opt.sheaf, "sheaf spec, e.g. O(V: d3) * tw(1,0,0)")->required();
    charge->add_flag("--nonequiv", opt.nonequiv, "take the non-equivariant limit");
    charge->add_flag("--char-sum", opt.char_sum, "replace a point class by its character sum");

    auto* cmp = app.add_subcommand("compare01", "quadrature vs central charge for the generators");
    add_common(cmp);

    auto* gkz = app.add_subcommand("gkz", "annihilation report for the box operators");
    add_common(gkz);

    auto* tr = app.add_subcommand("tr", "topological recursion on a spectral curve");
    tr->add_option("--curve", opt.curve_path, "spectral curve JSON")->required();
    tr->add_option("--g", opt.g, "genus")->required();
    tr->add_option("--n", opt.n, "points")->required();
    tr->add_option("--out", opt.out_path, "output path");
    tr->add_option("--golden", opt.golden_path, "golden file");

    auto* gs = app.add_subcommand("graphsum", "stable-graph sum on a spectral curve");
    gs->add_option("--curve", opt.curve_path, "spectral curve JSON")->required();
    gs->add_option("--g", opt.g, "genus")->required();
    gs->add_option("--n", opt.n, "points")->required();
    gs->add_flag("--check-against-recursion", opt.check_recursion, "compare with the recursion");
    gs->add_flag("--trace", opt.trace, "log one line per graph");
    gs->add_option("--out", opt.out_path, "output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (inspect->parsed()) return cmd_inspect(opt);
        if (charge->parsed()) return cmd_charge(opt);
        if (cmp->parsed()) return cmd_compare01(opt);
        if (gkz->parsed()) return cmd_gkz(opt);
        if (tr->parsed()) return cmd_tr(opt);
        if (gs->parsed()) return cmd_graphsum(opt);
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return EXIT_PARSE;
    } catch (const sheaf_parse_error& e) {
        std::cerr << "sheaf spec error: " << e.what() << "\n";
        return EXIT_PARSE;
    } catch (const structural_error& e) {
        std::cerr << "structural error: " << e.what() << "\n";
        return EXIT_PARSE;
    } catch (const fan_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return EXIT_VALIDATION;
    } catch (const ktheory_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return EXIT_VALIDATION;
    } catch (const curve_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return EXIT_TOLERANCE;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_TOLERANCE;
    }
    return 0;
}
