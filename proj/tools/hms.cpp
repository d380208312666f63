// Command-line driver: field data, shuffle sets, iterated-integral series,
// modular-symbol pairings, cone sums and L-values, and the verification
// suites with machine-readable output.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hms/chen.hpp"
#include "hms/dedekind.hpp"
#include "hms/io.hpp"
#include "hms/membrane.hpp"
#include "hms/ncring.hpp"
#include "hms/quadfield.hpp"
#include "hms/shuffle.hpp"
#include "hms/symbols.hpp"

using namespace hms;
using nlohmann::json;

namespace {

struct RunConfig {
    long long d = 2;
    int nodes = 24;
    int depth = 2;
    double bound = 40.0;
    int window = 8;
    double tolerance_scale = 1.0;
    std::uint64_t seed = 0x5eedULL;
    std::string format = "json";

    void validate() const {
        if (nodes < 4 || nodes > 256) throw CLI::ValidationError("nodes out of range [4,256]");
        if (depth < 0 || depth > 3) throw CLI::ValidationError("depth out of range [0,3]");
        if (bound <= 0 || window < 0) throw CLI::ValidationError("bad truncation bounds");
        if (format != "json" && format != "csv") throw CLI::ValidationError("format must be json|csv");
    }
    QuadOptions quad() const {
        QuadOptions o;
        o.base.nodes_per_dim = nodes;
        o.base.monte_carlo_seed = seed;
        return o;
    }
};

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot open config file: " + path);
    json j;
    in >> j;
    if (j.contains("d")) cfg.d = j["d"].get<long long>();
    if (j.contains("nodes")) cfg.nodes = j["nodes"].get<int>();
    if (j.contains("depth")) cfg.depth = j["depth"].get<int>();
    if (j.contains("bound")) cfg.bound = j["bound"].get<double>();
    if (j.contains("window")) cfg.window = j["window"].get<int>();
    if (j.contains("tolerance_scale")) cfg.tolerance_scale = j["tolerance_scale"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
}

QuadInt parse_quadint(const std::string& s) {
    std::string t = s;
    if (!t.empty() && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
    auto comma = t.find(',');
    try {
        if (comma == std::string::npos) return QuadInt(std::stoll(t), 0);
        return QuadInt(std::stoll(t.substr(0, comma)), std::stoll(t.substr(comma + 1)));
    } catch (const std::exception&) {
        throw CLI::ValidationError("cannot parse element: " + s);
    }
}

Cusp parse_cusp(const FieldContext& F, const std::string& s) {
    if (s == "inf" || s == "oo") return Cusp::infinity();
    if (s == "eps") return Cusp::from_quadint(F.eps());
    if (s == "eps^-1") return Cusp::from_quadint(F.conj(F.eps()));
    if (s == "eps^2") return Cusp::from_quadint(F.mul(F.eps(), F.eps()));
    auto slash = s.find('/');
    if (slash == std::string::npos) return Cusp(parse_quadint(s), QuadInt(1, 0));
    return Cusp(parse_quadint(s.substr(0, slash)), parse_quadint(s.substr(slash + 1)));
}

MatrixK parse_matrix(const std::string& s) {
    // four "(a,b)" groups: entries a, b, c, d
    std::vector<QuadInt> entries;
    std::size_t pos = 0;
    while (entries.size() < 4) {
        auto open = s.find('(', pos);
        auto close = s.find(')', open);
        if (open == std::string::npos || close == std::string::npos)
            throw CLI::ValidationError("matrix needs four (a,b) entries");
        entries.push_back(parse_quadint(s.substr(open, close - open + 1)));
        pos = close + 1;
    }
    return MatrixK(entries[0], entries[1], entries[2], entries[3]);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path, std::ios::binary);
        out << j.dump(2) << "\n";
    }
}

long long elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
        .count();
}

// ---------------------------------------------------------------- suites --

std::vector<ExpForm1> seeded_forms1(std::mt19937_64& gen, int count) {
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    std::vector<ExpForm1> out;
    for (int i = 0; i < count; ++i)
        out.push_back(ExpForm1({ExpForm1::Term{Complex(c(gen), c(gen)), 1 + (int)(gen() % 2)}}));
    return out;
}

Report suite_chen(const RunConfig& cfg) {
    Report all;
    std::mt19937_64 gen(cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    QuadratureConfig q;
    q.nodes_per_dim = std::max(cfg.nodes, 20);
    for (int trial = 0; trial < 4; ++trial) {
        Complex a(u(gen), 1 + u(gen)), mid(u(gen), 1 + u(gen)), b(u(gen), 1 + u(gen));
        Path g1 = Path::segment(a, mid), g2 = Path::segment(mid, b);
        int m = 2 + static_cast<int>(gen() % 2);
        std::vector<ExpForm1> w = seeded_forms1(gen, m);
        Report comp = verify_composition(w, g1, g2, q, 1e-10 * cfg.tolerance_scale, 2);
        for (auto& row : comp.rows) {
            row.name = "t" + std::to_string(trial) + "_" + row.name;
            all.rows.push_back(row);
        }
        Path g = Path::concatenation({g1, g2});
        for (int i = 0; i <= m; ++i) {
            Report sh = verify_path_shuffle(w, g, i, q, 1e-9 * cfg.tolerance_scale);
            for (auto& row : sh.rows) {
                row.name = "t" + std::to_string(trial) + "_" + row.name;
                all.rows.push_back(row);
            }
        }
    }
    return all;
}

Report suite_membrane(const RunConfig& cfg) {
    Report all;
    auto F = FieldContext::make(cfg.d);
    QuadOptions o = cfg.quad();
    Membrane dia = Membrane::diangle(1.0, F.eps1() / F.eps2());
    std::vector<ExpForm2> w{ExpForm2::single(F, Complex(1, 0), QuadInt(1, 0)),
                            ExpForm2::single(F, Complex(1, 0), F.eps())};

    for (int split = 0; split <= 2; ++split) {
        Report r = verify_membrane_shuffle(w, split, dia, o, 1e-8 * cfg.tolerance_scale,
                                           1e-6 * cfg.tolerance_scale,
                                           split == 1 ? std::min(cfg.depth, 2) : 0);
        for (auto& row : r.rows) all.rows.push_back(row);
    }

    std::vector<ExpForm2> w1{w[0]};
    Report comp = verify_type_a_composition(w1, Membrane::diangle(0.5, 2.0), 0.5, 0.5, 2, o,
                                            1e-7 * cfg.tolerance_scale);
    for (auto& row : comp.rows) all.rows.push_back(row);

    for (const auto& [name, memb] :
         {std::pair<std::string, Membrane>{"diangle", dia},
          {"box", Membrane::box_cuspward()}}) {
        Report fol = check_foliation(memb);
        all.add("foliation_" + name, fol.max_residual(), 1e-9);
    }

    auto psi = [](double t) { return t * t * (3.0 - 2.0 * t); };
    auto dpsi = [](double t) { return 6.0 * t * (1.0 - t); };
    QuadOptions og = o;
    og.base.nodes_per_dim = std::max(cfg.nodes, 28);
    og.force_generic = true;
    Membrane rep = dia.reparametrized(psi, dpsi, [](double t) { return t; }, [](double) { return 1.0; });
    Report h = verify_homotopy_invariance(w, dia, rep, og, 2, 1e-8 * cfg.tolerance_scale);
    for (auto& row : h.rows) all.rows.push_back(row);
    return all;
}

Report suite_symbols(const RunConfig& cfg) {
    Report all;
    auto F = FieldContext::make(cfg.d);
    QuadOptions o = cfg.quad();
    o.base.nodes_per_dim = std::max(cfg.nodes, 192);
    std::mt19937_64 gen(cfg.seed + 17);
    std::uniform_int_distribution<long long> dist(-3, 3);
    ExpForm2 f = ExpForm2::single(F, Complex(1, 0), QuadInt(1, 0));
    MatrixK curve(QuadInt(1, 0), QuadInt(0, 0), QuadInt(0, 0), QuadInt(0, 1));
    std::vector<Cusp> rat{Cusp::from_int(0), Cusp::infinity(), Cusp::from_int(1),
                          Cusp::from_int(-2)};

    int done = 0;
    while (done < 3) {
        std::vector<Cusp> five;
        for (int i = 0; i < 5; ++i) {
            QuadInt p(dist(gen), dist(gen)), q(dist(gen), dist(gen));
            if ((p.is_zero() && q.is_zero()) || (!q.is_zero() && F.norm(q).is_zero())) {
                --i;
                continue;
            }
            five.push_back(Cusp(p, q));
        }
        bool ok = true;
        for (std::size_t i = 0; ok && i < five.size(); ++i)
            for (std::size_t j = i + 1; ok && j < five.size(); ++j)
                if (cusp_equal(F, five[i], five[j])) ok = false;
        if (ok) {
            try {
                for (auto [i, j] : {std::pair<int, int>{2, 3}, {3, 4}, {2, 4}}) {
                    Diangle t = build_diangle(F, five[0], five[1], five[i], five[j]);
                    double ls = std::abs(std::log(t.symbol.slope4));
                    if (t.symbol.degenerate || ls < 0.1 || ls > 3.5) ok = false;
                    auto [a1, a2] = F.embed(QuadInt(1, 0));
                    if (ok && membrane_phase_bound(t.membrane, a1, a2) > 40.0) ok = false;
                }
            } catch (const std::exception&) {
                ok = false;
            }
        }
        if (!ok) continue;
        ++done;
        Report r = verify_commutative_relations(F, five, rat, curve, f, o,
                                                1e-8 * cfg.tolerance_scale,
                                                1e-8 * cfg.tolerance_scale,
                                                1e-7 * cfg.tolerance_scale);
        for (auto& row : r.rows) {
            row.name = "cfg" + std::to_string(done) + "_" + row.name;
            all.rows.push_back(row);
        }
    }

    QuadOptions oc = cfg.quad();
    std::vector<ExpForm2> forms{f};
    Report c1 = verify_c1_composition(F, Cusp::from_int(0), Cusp::infinity(), Cusp::from_int(1),
                                      Cusp::from_quadint(F.eps()),
                                      Cusp::from_quadint(F.mul(F.eps(), F.eps())), forms,
                                      std::min(cfg.depth, 2), oc, 1e-6 * cfg.tolerance_scale);
    for (auto& row : c1.rows) all.rows.push_back(row);
    return all;
}

Report suite_dedekind(const RunConfig& cfg) {
    Report all;
    auto F = FieldContext::make(cfg.d);
    QuadOptions o = cfg.quad();

    auto z8 = Z_value(F, 3, 2, cfg.bound, 8);
    auto z12 = Z_value(F, 3, 2, cfg.bound, 12);
    all.add("Z32_window_stability", std::abs(z12.value - z8.value) / std::abs(z12.value),
            1e-6 * cfg.tolerance_scale);
    double q = 2.0 / F.eps1();
    double worst = 0.0;
    int K = 12;
    for (int k = 3; k < K; ++k) {
        worst = std::max(worst, z12.window_terms[K + k + 1] / (q * z12.window_terms[K + k]));
        worst = std::max(worst, z12.window_terms[K - k - 1] / (q * z12.window_terms[K - k]));
    }
    all.add("Z32_decay_ratio_vs_2_over_eps1", worst, 1.0);
    all.add("Z32_majorant",
            z12.value <= Z_finiteness_majorant(F, 3, 2, cfg.bound) ? 0.0 : 1.0, 0.5);

    ExpForm2 f = unit_orbit_form(F, Complex(1, 0), QuadInt(1, 0), 3);
    for (int n : {1, 2}) {
        auto sv = L_single(f, n, LMode::series, o);
        auto iv = L_single(f, n, LMode::integral, o);
        all.add("Lsingle_n" + std::to_string(n) + "_series_vs_integral",
                std::abs(iv.value - sv.value) / std::abs(sv.value), 1e-6 * cfg.tolerance_scale);
    }
    for (auto [m, n] : {std::pair<int, int>{2, 1}, {2, 2}}) {
        int K2 = 5;
        ExpForm2 ff = unit_orbit_form(F, Complex(1, 0), QuadInt(1, 0), K2);
        auto sv = L_double(ff, ff, m, n, LMode::series, o, ConeVariant::strict, K2 + 4);
        auto iv = L_double(ff, ff, m, n, LMode::integral, o);
        int N = m + n;
        double pref = std::pow(2.0 * M_PI, -2.0 * N) * ((N % 2) ? -1.0 : 1.0);
        all.add("Ldouble_" + std::to_string(m) + std::to_string(n) + "_series_vs_integral",
                std::abs(iv.value - pref * sv.value) / std::abs(pref * sv.value),
                1e-3 * cfg.tolerance_scale);
    }

    Complex first(0, 0);
    double drift = 0.0;
    for (auto& pr : std::vector<std::pair<QuadInt, QuadInt>>{
             {QuadInt(1, 0), QuadInt(1, 0)}, {QuadInt(1, 0), QuadInt(3, 2)},
             {QuadInt(2, 1), QuadInt(1, 0)}}) {
        Complex c = fitted_prefactor(F, pr.first, pr.second, 3, 2, o);
        if (first == Complex(0, 0)) first = c;
        drift = std::max(drift, std::abs(c - first) / std::abs(first));
    }
    all.add("prefactor_constancy_32", drift, 1e-6 * cfg.tolerance_scale);
    return all;
}

int run_verify(const std::string& suite, const RunConfig& cfg, const std::string& out_path) {
    json rows = json::array();
    bool all_pass = true;
    auto run = [&](const std::string& name, Report (*fn)(const RunConfig&)) {
        auto t0 = std::chrono::steady_clock::now();
        Report rep = fn(cfg);
        std::fprintf(stderr, "[%s] %zu checks, max residual %.3g, %lld ms\n", name.c_str(),
                     rep.rows.size(), rep.max_residual(), elapsed_ms(t0));
        for (const auto& r : rep.rows) {
            rows.push_back(json{{"check", r.name},
                                {"suite", name},
                                {"residual", r.residual},
                                {"tolerance", r.tolerance},
                                {"pass", r.pass}});
            if (!r.pass) all_pass = false;
            std::printf("%-4s %-52s %12.4e %10.1e\n", r.pass ? "ok" : "FAIL", r.name.c_str(),
                        r.residual, r.tolerance);
        }
    };
    if (suite == "chen" || suite == "all") run("chen", suite_chen);
    if (suite == "membrane" || suite == "all") run("membrane", suite_membrane);
    if (suite == "symbols" || suite == "all") run("symbols", suite_symbols);
    if (suite == "dedekind" || suite == "all") run("dedekind", suite_dedekind);
    if (rows.empty()) throw CLI::ValidationError("unknown suite: " + suite);

    if (!out_path.empty()) {
        if (cfg.format == "csv") {
            std::ofstream out(out_path, std::ios::binary);
            out << "check,suite,residual,tolerance,pass\n";
            for (const auto& r : rows)
                out << r["check"].get<std::string>() << "," << r["suite"].get<std::string>() << ","
                    << fmt_double(r["residual"].get<double>()) << ","
                    << fmt_double(r["tolerance"].get<double>()) << ","
                    << (r["pass"].get<bool>() ? "true" : "false") << "\n";
        } else {
            json doc;
            doc["config"] = json{{"d", cfg.d},       {"nodes", cfg.nodes},
                                 {"depth", cfg.depth}, {"bound", cfg.bound},
                                 {"window", cfg.window}, {"seed", cfg.seed}};
            doc["suite"] = suite;
            doc["checks"] = rows;
            doc["all_pass"] = all_pass;
            emit(doc, out_path);
        }
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"iterated membrane integrals, Hilbert modular symbols, and "
                 "multiple Dedekind zeta values over real quadratic fields"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path, out_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (schema in README)");
        sub->add_option("-d,--d", cfg.d, "squarefree field discriminant part");
        sub->add_option("--nodes", cfg.nodes, "quadrature nodes per dimension");
        sub->add_option("--depth", cfg.depth, "series truncation depth");
        sub->add_option("--bound", cfg.bound, "cone enumeration height bound");
        sub->add_option("--window", cfg.window, "unit power window");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--format", cfg.format, "output format: json|csv");
        sub->add_option("-o,--out", out_path, "write results to file");
    };

    auto* c_field = app.add_subcommand("field", "ring of integers, units, embeddings");
    add_common(c_field);

    auto* c_shuffle = app.add_subcommand("shuffle", "shuffle sets sh(i,j)");
    int sh_i = 2, sh_j = 2;
    c_shuffle->add_option("-i", sh_i, "first block size")->required();
    c_shuffle->add_option("-j", sh_j, "second block size")->required();
    add_common(c_shuffle);

    auto* c_chen = app.add_subcommand("chen", "iterated path integral generating series");
    add_common(c_chen);

    auto* c_membrane = app.add_subcommand("membrane", "J^a and J^b series on a diangle");
    std::string memb_form_file;
    c_membrane->add_option("--forms", memb_form_file, "JSON form file");
    add_common(c_membrane);

    auto* c_symbol = app.add_subcommand("symbol", "non-commutative symbol c1");
    std::string sp1 = "0", sp2 = "inf", sp3 = "1", sgamma = "(1,0),(0,0),(0,0),(1,0)";
    std::string sym_form_file;
    c_symbol->add_option("--p1", sp1, "first cusp, e.g. (1,0)/(2,0) or inf");
    c_symbol->add_option("--p2", sp2, "second cusp");
    c_symbol->add_option("--p3", sp3, "base cusp");
    c_symbol->add_option("--gamma", sgamma, "matrix entries (a),(b),(c),(d) as (x,y) pairs");
    c_symbol->add_option("--forms", sym_form_file, "JSON form file");
    add_common(c_symbol);

    auto* c_diangle = app.add_subcommand("diangle", "unit diangle pairing vs closed form");
    std::string su = "eps", salpha = "1,0";
    c_diangle->add_option("--u", su, "totally positive unit (eps or (a,b))");
    c_diangle->add_option("--alpha", salpha, "exponent a,b");
    add_common(c_diangle);

    auto* c_zeta = app.add_subcommand("zeta", "multiple Dedekind zeta values");
    std::string sk = "2";
    std::string sZ;
    c_zeta->add_option("--k", sk, "exponents k1[,k2,...]");
    c_zeta->add_option("--Z", sZ, "compute Z(m,n) instead, as m,n");
    add_common(c_zeta);

    auto* c_lvalue = app.add_subcommand("lvalue", "iterated L-values, series and integral");
    int lm = 2, ln = 2, lorbit = 3;
    std::string lmode = "both", sa = "1,0", sb = "1,0";
    c_lvalue->add_option("--m", lm, "first exponent");
    c_lvalue->add_option("--n", ln, "second exponent");
    c_lvalue->add_option("--mode", lmode, "series|integral|both");
    c_lvalue->add_option("--orbit", lorbit, "unit orbit half width");
    c_lvalue->add_option("--alpha", sa, "base exponent of f");
    c_lvalue->add_option("--beta", sb, "base exponent of g");
    add_common(c_lvalue);

    auto* c_verify = app.add_subcommand("verify", "run verification suites");
    std::string suite;
    c_verify->add_option("suite", suite, "chen|membrane|symbols|dedekind|all")->required();
    c_verify->add_option("--tolerance-scale", cfg.tolerance_scale, "scale all tolerances");
    add_common(c_verify);

    try {
        app.parse(argc, argv);
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        cfg.validate();

        if (app.got_subcommand(c_field)) {
            auto t0 = std::chrono::steady_clock::now();
            auto F = FieldContext::make(cfg.d);
            json j;
            j["d"] = cfg.d;
            j["omega"] = F.omega_kind() == OmegaKind::half_plus_sqrt_d ? "(1+sqrt d)/2" : "sqrt d";
            j["omega_embeddings"] = {F.omega_embeddings().first, F.omega_embeddings().second};
            j["fundamental_unit"] = {{"a", F.fundamental_unit().a.to_string()},
                                     {"b", F.fundamental_unit().b.to_string()}};
            j["fundamental_unit_norm"] = F.norm(F.fundamental_unit()).to_string();
            j["eps"] = {{"a", F.eps().a.to_string()}, {"b", F.eps().b.to_string()}};
            j["eps_embeddings"] = {F.eps1(), F.eps2()};
            // a mixed-sign unit exists exactly when the fundamental unit has
            // norm -1; several constructions need one, so flag its absence
            bool mixed = F.norm(F.fundamental_unit()) == BigInt(-1);
            j["mixed_sign_unit_exists"] = mixed;
            if (!mixed)
                std::cerr << "advisory: no unit with mixed-sign embeddings for d = " << cfg.d
                          << " (fundamental unit has norm +1)\n";
            j["runtime_ms"] = elapsed_ms(t0);
            emit(j, out_path);
        } else if (app.got_subcommand(c_shuffle)) {
            auto set = shuffles(sh_i, sh_j);
            json j;
            j["i"] = sh_i;
            j["j"] = sh_j;
            j["count"] = set.size();
            json perms = json::array();
            for (const auto& p : set) perms.push_back(p.one_line());
            j["shuffles"] = perms;
            emit(j, out_path);
        } else if (app.got_subcommand(c_chen)) {
            auto t0 = std::chrono::steady_clock::now();
            QuadratureConfig q;
            q.nodes_per_dim = cfg.nodes;
            std::vector<ExpForm1> forms{ExpForm1::dz(), ExpForm1::single(Complex(1, 0), 1)};
            Path g = Path::segment(Complex(0, 1), Complex(1, 1.5));
            WordSeries s = generating_series_F(forms, g, cfg.depth, q);
            json j;
            j["path"] = "segment i -> 1 + 1.5i";
            j["series"] = word_series_to_json(s);
            j["runtime_ms"] = elapsed_ms(t0);
            emit(j, out_path);
        } else if (app.got_subcommand(c_membrane)) {
            auto t0 = std::chrono::steady_clock::now();
            auto F = FieldContext::make(cfg.d);
            std::vector<ExpForm2> forms;
            if (memb_form_file.empty()) {
                forms.push_back(ExpForm2::single(F, Complex(1, 0), QuadInt(1, 0)));
            } else {
                forms.push_back(load_form_file(memb_form_file, F));
            }
            Membrane dia = Membrane::diangle(1.0, F.eps1() / F.eps2());
            json j;
            j["membrane"] = "diangle slopes [1, eps1/eps2]";
            j["Ja"] = word_series_to_json(generating_series_Ja(forms, dia, cfg.depth, cfg.quad()));
            j["Jb"] = series_to_json(generating_series_Jb(forms, dia, cfg.depth, cfg.quad()));
            j["runtime_ms"] = elapsed_ms(t0);
            emit(j, out_path);
        } else if (app.got_subcommand(c_symbol)) {
            auto t0 = std::chrono::steady_clock::now();
            auto F = FieldContext::make(cfg.d);
            Cusp p1 = parse_cusp(F, sp1), p2 = parse_cusp(F, sp2), p3 = parse_cusp(F, sp3);
            MatrixK gamma = parse_matrix(sgamma);
            std::vector<ExpForm2> forms;
            if (sym_form_file.empty())
                forms.push_back(ExpForm2::single(F, Complex(1, 0), QuadInt(1, 0)));
            else
                forms.push_back(load_form_file(sym_form_file, F));
            NCSeries c1 = nc_symbol_c1(F, p1, p2, p3, gamma, forms, cfg.depth, cfg.quad());
            json j;
            j["p1"] = p1.to_string();
            j["p2"] = p2.to_string();
            j["p3"] = p3.to_string();
            j["gamma_p3"] = gamma.act_cusp(F, p3).to_string();
            j["c1"] = series_to_json(c1);
            j["runtime_ms"] = elapsed_ms(t0);
            emit(j, out_path);
        } else if (app.got_subcommand(c_diangle)) {
            auto t0 = std::chrono::steady_clock::now();
            auto F = FieldContext::make(cfg.d);
            QuadInt u = (su == "eps") ? F.eps() : parse_quadint(su);
            if (!F.totally_positive(u) || F.norm(u) != BigInt(1))
                throw CLI::ValidationError("u must be a totally positive unit");
            QuadInt alpha = parse_quadint(salpha);
            auto [u1, u2] = F.embed(u);
            auto [a1, a2] = F.embed(alpha);
            Diangle dia = build_diangle(F, Cusp::from_int(0), Cusp::infinity(),
                                        Cusp::from_quadint(F.conj(u)), Cusp::from_quadint(u));
            Complex got = pair_commutative(F, dia, ExpForm2::single(F, Complex(1, 0), alpha),
                                           cfg.quad()).value;
            double closed = -(u2 * u2 - u1 * u1) / (4.0 * M_PI * M_PI * (a1 * u1 + a2 * u2) *
                                                    (a1 * u2 + a2 * u1));
            json j;
            j["u_embeddings"] = {u1, u2};
            j["alpha_embeddings"] = {a1, a2};
            j["quadrature"] = {got.real(), got.imag()};
            j["closed_form"] = closed;
            j["relative_gap"] = std::abs(got - Complex(closed, 0)) / std::abs(closed);
            j["runtime_ms"] = elapsed_ms(t0);
            emit(j, out_path);
        } else if (app.got_subcommand(c_zeta)) {
            auto t0 = std::chrono::steady_clock::now();
            auto F = FieldContext::make(cfg.d);
            json j;
            if (!sZ.empty()) {
                auto comma = sZ.find(',');
                if (comma == std::string::npos) throw CLI::ValidationError("--Z needs m,n");
                int zm = std::stoi(sZ.substr(0, comma)), zn = std::stoi(sZ.substr(comma + 1));
                auto r = Z_value(F, zm, zn, cfg.bound, cfg.window);
                j["spec"] = {{"Z", {zm, zn}}, {"d", cfg.d}, {"bound", cfg.bound},
                             {"window", cfg.window}};
                j["value"] = r.value;
                j["tail_bound"] = r.tail_bound;
                j["window_tail"] = r.window_tail;
                j["window_terms"] = r.window_terms;
            } else {
                std::vector<int> ks;
                std::size_t pos = 0;
                while (pos <= sk.size()) {
                    auto comma = sk.find(',', pos);
                    if (comma == std::string::npos) comma = sk.size();
                    ks.push_back(std::stoi(sk.substr(pos, comma - pos)));
                    pos = comma + 1;
                }
                ConeSumSpec spec;
                spec.field = &F;
                spec.exponents = ks;
                spec.height_bound = cfg.bound;
                for (std::size_t i = 0; i < ks.size(); ++i)
                    spec.cones.push_back(Cone{&F, 0, ConeVariant::strict});
                auto r = mdzv(spec);
                j["spec"] = {{"k", ks}, {"d", cfg.d}, {"bound", cfg.bound}};
                j["value"] = r.value;
                j["tail_bound"] = r.tail_bound;
                j["terms"] = r.terms;
            }
            j["mode"] = "series";
            j["runtime_ms"] = elapsed_ms(t0);
            emit(j, out_path);
        } else if (app.got_subcommand(c_lvalue)) {
            auto t0 = std::chrono::steady_clock::now();
            auto F = FieldContext::make(cfg.d);
            ExpForm2 f = unit_orbit_form(F, Complex(1, 0), parse_quadint(sa), lorbit);
            ExpForm2 g = unit_orbit_form(F, Complex(1, 0), parse_quadint(sb), lorbit);
            json j;
            j["spec"] = {{"m", lm}, {"n", ln}, {"d", cfg.d}, {"orbit", lorbit}, {"mode", lmode}};
            int N = lm + ln;
            double pref = std::pow(2.0 * M_PI, -2.0 * N) * ((N % 2) ? -1.0 : 1.0);
            Complex sv(0, 0), iv(0, 0);
            if (lmode == "series" || lmode == "both") {
                auto r = L_double(f, g, lm, ln, LMode::series, cfg.quad(), ConeVariant::strict,
                                  lorbit + 4);
                sv = r.value;
                j["series"] = {r.value.real(), r.value.imag()};
                j["series_tail_bound"] = r.tail_bound;
            }
            if (lmode == "integral" || lmode == "both") {
                auto r = L_double(f, g, lm, ln, LMode::integral, cfg.quad());
                iv = r.value;
                j["integral"] = {r.value.real(), r.value.imag()};
            }
            if (lmode == "both") {
                j["normalization"] = pref;
                j["relative_gap"] = std::abs(iv - pref * sv) / std::abs(pref * sv);
            }
            j["runtime_ms"] = elapsed_ms(t0);
            emit(j, out_path);
        } else if (app.got_subcommand(c_verify)) {
            return run_verify(suite, cfg, out_path);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const invalid_field_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
