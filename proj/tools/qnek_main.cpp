// qnek: config-driven front end.
//   qnek verify     --config params.cfg --seed 42 --out report.json
//   qnek eval-block --config block.cfg  --cutoff 4 --format csv
//   qnek eval-tau   --config tau.cfg    --radius 2 --cutoff 6
//
// Parameter files are flat key=value text; complex numbers are "re+imi"
// strings; unknown keys are rejected. Exit codes: 0 all checks pass,
// 1 a check failed, 2 configuration error.

#include "qnek/blocks.hpp"
#include "qnek/lax.hpp"
#include "qnek/report.hpp"
#include "qnek/suite.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace {

using namespace qnek;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "re", "rei" (pure imaginary like "0.4i"), or "re+imi" / "re-imi".
cplx parse_complex(const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw ConfigError("empty complex literal");

    bool imag_tail = s.back() == 'i' || s.back() == 'I';
    std::string body = imag_tail ? s.substr(0, s.size() - 1) : s;

    // split at the last '+'/'-' that is not a leading sign or an exponent sign
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if (body[k] != '+' && body[k] != '-') continue;
        char prev = body[k - 1];
        if (prev == 'e' || prev == 'E') continue;
        split = k;
        break;
    }

    auto to_real = [&raw](const std::string& t) {
        if (t.empty() || t == "+" ) return 1.0;
        if (t == "-") return -1.0;
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            throw ConfigError("bad number in complex literal \"" + raw + "\"");
        }
        if (used != t.size())
            throw ConfigError("bad number in complex literal \"" + raw + "\"");
        return v;
    };

    if (!imag_tail) {
        if (split != std::string::npos)
            throw ConfigError("complex literal \"" + raw + "\" missing the trailing i");
        return cplx(to_real(body), 0.0);
    }
    if (split == std::string::npos) return cplx(0.0, to_real(body));
    return cplx(to_real(body.substr(0, split)), to_real(body.substr(split)));
}

std::vector<cplx> parse_complex_list(const std::string& raw) {
    std::vector<cplx> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_complex(item));
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& t) {
            auto tb = t.find_first_not_of(" \t");
            auto te = t.find_last_not_of(" \t");
            t = (tb == std::string::npos) ? "" : t.substr(tb, te - tb + 1);
        };
        trim(key);
        trim(val);
        if (key.empty() || val.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key or value");
        if (kv.count(key))
            throw ConfigError(path + ": duplicate key \"" + key + "\"");
        kv[key] = val;
    }
    return kv;
}

// consume-and-check wrapper so leftovers can be rejected
struct KeyBag {
    std::map<std::string, std::string> kv;
    bool has(const std::string& k) const { return kv.count(k) != 0; }
    std::string take(const std::string& k) {
        auto it = kv.find(k);
        if (it == kv.end()) throw ConfigError("missing required key \"" + k + "\"");
        std::string v = it->second;
        kv.erase(it);
        return v;
    }
    bool take_into(const std::string& k, std::string& out) {
        auto it = kv.find(k);
        if (it == kv.end()) return false;
        out = it->second;
        kv.erase(it);
        return true;
    }
    void reject_leftovers() const {
        if (kv.empty()) return;
        std::string msg = "unknown configuration key(s):";
        for (const auto& [k, v] : kv) msg += " \"" + k + "\"";
        throw ConfigError(msg);
    }
};

int parse_int(const std::string& s) {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw ConfigError("bad integer \"" + s + "\"");
    return v;
}

real parse_real(const std::string& s) {
    std::size_t used = 0;
    real v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("bad number \"" + s + "\"");
    return v;
}

// keys: N, m, theta_inf, theta_0, theta, sigma1..sigma<m>, s1..s<m>, t
LaxParams lax_from_bag(KeyBag& bag) {
    LaxParams p;
    p.N = parse_int(bag.take("N"));
    p.m = parse_int(bag.take("m"));
    auto vec_of = [&](const std::string& key, int want) {
        auto v = parse_complex_list(bag.take(key));
        if (static_cast<int>(v.size()) != want)
            throw ConfigError("key \"" + key + "\" needs " + std::to_string(want) + " entries");
        return v;
    };
    p.theta_inf = vec_of("theta_inf", p.N);
    p.theta_0 = vec_of("theta_0", p.N);
    p.thetas = vec_of("theta", p.m + 1);
    for (int i = 1; i <= p.m; ++i) {
        p.sigmas.push_back(vec_of("sigma" + std::to_string(i), p.N));
        p.s.push_back(vec_of("s" + std::to_string(i), p.N));
    }
    p.t = vec_of("t", p.m + 1);
    return p;
}

// keys: N, theta (m entries), sigma0..sigma<m>, x (m points, logs taken here)
BlockParams block_from_bag(KeyBag& bag) {
    BlockParams p;
    p.N = parse_int(bag.take("N"));
    p.thetas = parse_complex_list(bag.take("theta"));
    const int m = static_cast<int>(p.thetas.size());
    for (int i = 0; i <= m; ++i) {
        auto v = parse_complex_list(bag.take("sigma" + std::to_string(i)));
        if (static_cast<int>(v.size()) != p.N)
            throw ConfigError("sigma" + std::to_string(i) + " needs " +
                              std::to_string(p.N) + " entries");
        p.sigmas.push_back(v);
    }
    auto xs = parse_complex_list(bag.take("x"));
    if (static_cast<int>(xs.size()) != m)
        throw ConfigError("key \"x\" needs one point per theta");
    for (cplx x : xs) p.point_logs.push_back(std::log(x));
    return p;
}

std::string fmt_cplx(cplx z) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g%+.15gi", z.real(), z.imag());
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

int cmd_verify(const std::string& config_path, long seed_flag, const std::string& out_path,
               const std::string& format) {
    SuiteConfig cfg = default_suite_config();
    if (!config_path.empty()) {
        KeyBag bag{read_kv_file(config_path)};
        std::string v;
        if (bag.take_into("q", v)) cfg.base = QBase(parse_complex(v));
        if (bag.take_into("seed", v)) cfg.seed = static_cast<unsigned>(parse_int(v));
        if (bag.take_into("cutoff", v)) cfg.cutoff = parse_int(v);
        if (bag.take_into("lax_cutoff", v)) cfg.lax_cutoff = parse_int(v);
        if (bag.take_into("radius", v)) cfg.radius = parse_int(v);
        if (bag.take_into("tol_scale", v)) cfg.tol_scale = parse_real(v);
        if (bag.has("N")) cfg.lax = lax_from_bag(bag);
        bag.reject_leftovers();
    }
    if (seed_flag >= 0) cfg.seed = static_cast<unsigned>(seed_flag);

    auto reports = run_suite(cfg);
    const std::string text = (format == "csv") ? reports_to_csv(reports, false)
                                               : reports_to_json(reports, false);
    write_text(out_path, text);

    int failed = 0, skipped = 0;
    for (const auto& r : reports) {
        if (!r.skipped.empty()) ++skipped;
        else if (!r.pass) ++failed;
    }
    std::fprintf(stderr, "%zu checks: %zu pass, %d fail, %d skipped\n", reports.size(),
                 reports.size() - failed - skipped, failed, skipped);
    return failed ? 1 : 0;
}

int cmd_eval_block(const std::string& config_path, int cutoff_flag, const std::string& format,
                   const std::string& out_path) {
    KeyBag bag{read_kv_file(config_path)};
    std::string v;
    QBase base(cplx(0.3, 0.0));
    if (bag.take_into("q", v)) base = QBase(parse_complex(v));
    Cutoffs c;
    if (bag.take_into("cutoff", v)) c.max_instanton = parse_int(v);
    BlockParams p = block_from_bag(bag);
    bag.reject_leftovers();
    if (cutoff_flag >= 0) c.max_instanton = cutoff_flag;
    p.check();

    if (format == "csv") {
        // cumulative partial sums by instanton level, one row per level
        std::string text = "level,value_re,value_im\n";
        for (int k = 0; k <= c.max_instanton; ++k) {
            Cutoffs ck = c;
            ck.max_instanton = k;
            cplx val = conformal_block(p, ck, base);
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", k, val.real(), val.imag());
            text += buf;
        }
        write_text(out_path, text);
    } else {
        cplx val = conformal_block(p, c, base);
        write_text(out_path, "block = " + fmt_cplx(val) + "\n");
    }
    return 0;
}

int cmd_eval_tau(const std::string& config_path, int radius_flag, int cutoff_flag) {
    KeyBag bag{read_kv_file(config_path)};
    std::string v;
    QBase base(cplx(0.3, 0.0));
    if (bag.take_into("q", v)) base = QBase(parse_complex(v));
    Cutoffs c;
    if (bag.take_into("cutoff", v)) c.max_instanton = parse_int(v);
    LatticeWindow w;
    if (bag.take_into("radius", v)) w.radius = parse_int(v);
    LaxParams p = lax_from_bag(bag);
    bag.reject_leftovers();
    if (cutoff_flag >= 0) c.max_instanton = cutoff_flag;
    if (radius_flag >= 0) w.radius = radius_flag;
    validate(p, base);

    cplx val = tau(p, w, c, base);
    std::printf("tau = %s\n", fmt_cplx(val).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-deformed block / tau evaluator and identity-suite runner"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "json";
    std::string verify_out = "report.json";
    long seed = -1;
    int cutoff = -1, radius = -1;

    auto* verify = app.add_subcommand("verify", "run the full identity suite");
    verify->add_option("--config", config_path, "parameter file (key = value)");
    verify->add_option("--seed", seed, "seed for the random parameter draws");
    verify->add_option("--out", verify_out, "report path ('-' = stdout)");
    verify->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* eb = app.add_subcommand("eval-block", "evaluate one block");
    eb->add_option("--config", config_path, "parameter file")->required();
    eb->add_option("--cutoff", cutoff, "instanton cutoff override");
    eb->add_option("--format", format, "json or csv (csv = partial-sum table)")
        ->check(CLI::IsMember({"json", "csv"}));
    eb->add_option("--out", out_path, "output path (default stdout)");

    auto* et = app.add_subcommand("eval-tau", "evaluate the tau function");
    et->add_option("--config", config_path, "parameter file")->required();
    et->add_option("--radius", radius, "lattice window radius override");
    et->add_option("--cutoff", cutoff, "instanton cutoff override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (verify->parsed()) return cmd_verify(config_path, seed, verify_out, format);
        if (eb->parsed()) return cmd_eval_block(config_path, cutoff, format, out_path);
        return cmd_eval_tau(config_path, radius, cutoff);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
