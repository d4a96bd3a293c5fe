#include "netform/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "netform/snapshot.hpp"

namespace netform {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    if (out.empty()) out.push_back("");
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError(key, "expected a number, got '" + v + "'");
    }
}

long parse_int(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    const long i = std::lround(x);
    if (x != static_cast<double>(i))
        throw ValidationError(key, "expected an integer, got '" + v + "'");
    return i;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (ss >> tok) out.push_back(parse_double(key, tok));
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ValidationError(key, "expected true/false, got '" + v + "'");
}

const std::set<std::string> kSections = {"grid",  "params", "stepping",
                                         "picard", "sweep",  "diagnostics"};

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    bool have_checkpoints = false, have_probes = false, have_t_target = false;

    std::map<std::string, std::string> kv;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError(line_no, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!kSections.count(section))
                throw ValidationError("[" + section + "]", "unknown section");
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ParseError(line_no, "expected 'key = value': " + s);
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (kv.count(full))
            throw ParseError(line_no, "duplicate key '" + full + "'");
        kv[full] = value;
    }

    auto take = [&](const std::string& full) {
        auto it = kv.find(full);
        if (it == kv.end()) return std::pair<bool, std::string>{false, ""};
        std::pair<bool, std::string> out{true, it->second};
        kv.erase(it);
        return out;
    };

    if (auto [ok, v] = take("mode"); ok) {
        if (v == "run") cfg.mode = RunMode::run;
        else if (v == "picard") cfg.mode = RunMode::picard;
        else if (v == "sweep") cfg.mode = RunMode::sweep;
        else throw ValidationError("mode", "must be run, picard, or sweep");
    }
    if (auto [ok, v] = take("seed"); ok)
        cfg.seed = static_cast<std::uint64_t>(parse_int("seed", v));

    if (auto [ok, v] = take("grid.dim"); ok)
        cfg.dim = static_cast<int>(parse_int("grid.dim", v));
    if (cfg.dim != 1 && cfg.dim != 2)
        throw ValidationError("grid.dim", "must be 1 or 2");
    if (auto [ok, v] = take("grid.n"); ok) {
        const auto vals = parse_list("grid.n", v);
        if (vals.size() != 1 && vals.size() != static_cast<std::size_t>(cfg.dim))
            throw ValidationError("grid.n", "expected 1 or dim values");
        auto as_int = [](double x) {
            const long i = std::lround(x);
            if (x != static_cast<double>(i))
                throw ValidationError("grid.n", "expected an integer");
            return static_cast<int>(i);
        };
        cfg.n[0] = as_int(vals[0]);
        cfg.n[1] = vals.size() == 2 ? as_int(vals[1]) : cfg.n[0];
        for (int a = 0; a < cfg.dim; ++a)
            if (cfg.n[a] < 3) throw ValidationError("grid.n", "needs at least 3 nodes per axis");
    }
    if (auto [ok, v] = take("grid.extent"); ok) {
        const auto vals = parse_list("grid.extent", v);
        if (vals.size() != 1 && vals.size() != static_cast<std::size_t>(cfg.dim))
            throw ValidationError("grid.extent", "expected 1 or dim values");
        cfg.extent[0] = vals[0];
        cfg.extent[1] = vals.size() == 2 ? vals[1] : vals[0];
        for (int a = 0; a < cfg.dim; ++a)
            if (!(cfg.extent[a] > 0.0))
                throw ValidationError("grid.extent", "must be positive");
    }

    if (auto [ok, v] = take("params.D"); ok) cfg.D = parse_double("params.D", v);
    if (!(cfg.D > 0.0)) throw ValidationError("params.D", "must be positive");
    if (auto [ok, v] = take("params.E"); ok) cfg.E = parse_double("params.E", v);
    if (!(cfg.E > 0.0)) throw ValidationError("params.E", "must be positive");
    if (auto [ok, v] = take("params.gamma"); ok)
        cfg.gamma = parse_double("params.gamma", v);
    if (!(cfg.gamma > 0.5))
        throw ValidationError("params.gamma", "must be greater than 0.5");
    if (auto [ok, v] = take("params.source"); ok) cfg.source = v;
    if (auto [ok, v] = take("params.m0"); ok) cfg.m0 = v;
    if (auto [ok, v] = take("params.scale"); ok)
        cfg.scale = parse_double("params.scale", v);
    if (!(cfg.scale >= 0.0)) throw ValidationError("params.scale", "must be nonnegative");

    if (auto [ok, v] = take("stepping.dt"); ok) cfg.dt = parse_double("stepping.dt", v);
    if (!(cfg.dt > 0.0)) throw ValidationError("stepping.dt", "must be positive");
    if (auto [ok, v] = take("stepping.t_end"); ok)
        cfg.t_end = parse_double("stepping.t_end", v);
    if (!(cfg.t_end > 0.0)) throw ValidationError("stepping.t_end", "must be positive");
    if (auto [ok, v] = take("stepping.store_every"); ok)
        cfg.store_every = static_cast<int>(parse_int("stepping.store_every", v));
    if (cfg.store_every < 1)
        throw ValidationError("stepping.store_every", "must be at least 1");
    if (auto [ok, v] = take("stepping.cg_tol"); ok)
        cfg.cg_tol = parse_double("stepping.cg_tol", v);
    if (!(cfg.cg_tol > 0.0)) throw ValidationError("stepping.cg_tol", "must be positive");
    if (auto [ok, v] = take("stepping.eps_reg"); ok)
        cfg.eps_reg = parse_double("stepping.eps_reg", v);
    if (!(cfg.eps_reg >= 0.0))
        throw ValidationError("stepping.eps_reg", "must be nonnegative");
    if (auto [ok, v] = take("stepping.blowup_threshold"); ok)
        cfg.blowup_threshold = parse_double("stepping.blowup_threshold", v);
    if (!(cfg.blowup_threshold > 0.0))
        throw ValidationError("stepping.blowup_threshold", "must be positive");
    if (auto [ok, v] = take("stepping.reaction"); ok) {
        if (v == "semi_implicit") cfg.reaction = ReactionMode::semi_implicit;
        else if (v == "explicit") cfg.reaction = ReactionMode::explicit_;
        else throw ValidationError("stepping.reaction",
                                   "must be semi_implicit or explicit");
    }

    if (auto [ok, v] = take("picard.k_max"); ok)
        cfg.k_max = static_cast<int>(parse_int("picard.k_max", v));
    if (cfg.k_max < 1) throw ValidationError("picard.k_max", "must be at least 1");
    if (auto [ok, v] = take("picard.tol"); ok)
        cfg.picard_tol = parse_double("picard.tol", v);
    if (!(cfg.picard_tol > 0.0))
        throw ValidationError("picard.tol", "must be positive");

    if (auto [ok, v] = take("sweep.scales"); ok) {
        cfg.sweep_scales = parse_list("sweep.scales", v);
        if (cfg.sweep_scales.empty())
            throw ValidationError("sweep.scales", "needs at least one scale");
    }
    for (std::size_t i = 0; i < cfg.sweep_scales.size(); ++i) {
        if (cfg.sweep_scales[i] < 0.0)
            throw ValidationError("sweep.scales", "scales must be nonnegative");
        if (i > 0 && cfg.sweep_scales[i] > cfg.sweep_scales[i - 1])
            throw ValidationError("sweep.scales", "scales must be sorted descending");
    }
    if (auto [ok, v] = take("sweep.t_target"); ok) {
        cfg.t_target = parse_double("sweep.t_target", v);
        have_t_target = true;
    }
    if (!have_t_target) cfg.t_target = cfg.t_end;
    if (!(cfg.t_target > 0.0))
        throw ValidationError("sweep.t_target", "must be positive");
    if (auto [ok, v] = take("sweep.bisect"); ok)
        cfg.bisect = parse_bool("sweep.bisect", v);
    if (auto [ok, v] = take("sweep.workers"); ok)
        cfg.workers = static_cast<int>(parse_int("sweep.workers", v));
    if (cfg.workers < 0) throw ValidationError("sweep.workers", "must be nonnegative");

    if (auto [ok, v] = take("diagnostics.probes"); ok) {
        have_probes = true;
        for (const std::string& group : split(v, ';')) {
            if (group.empty()) continue;
            const auto vals = parse_list("diagnostics.probes", group);
            if (vals.size() != static_cast<std::size_t>(cfg.dim) + 1)
                throw ValidationError("diagnostics.probes",
                                      "each probe needs dim+1 values (point, time)");
            cfg.probes.push_back({vals[0], cfg.dim == 2 ? vals[1] : 0.0,
                                  vals.back()});
        }
    }
    if (!have_probes)
        cfg.probes.push_back({0.5 * cfg.extent[0],
                              cfg.dim == 2 ? 0.5 * cfg.extent[1] : 0.0,
                              0.5 * cfg.t_end});
    if (auto [ok, v] = take("diagnostics.radii"); ok) {
        cfg.radii = parse_list("diagnostics.radii", v);
        if (cfg.radii.empty())
            throw ValidationError("diagnostics.radii", "needs at least one radius");
    }
    for (double r : cfg.radii)
        if (!(r > 0.0)) throw ValidationError("diagnostics.radii", "must be positive");
    if (auto [ok, v] = take("diagnostics.beta"); ok)
        cfg.beta = parse_double("diagnostics.beta", v);
    if (!(cfg.beta > 0.0)) throw ValidationError("diagnostics.beta", "must be positive");
    if (auto [ok, v] = take("diagnostics.excess_threshold"); ok)
        cfg.excess_threshold =
            v == "auto" ? -1.0 : parse_double("diagnostics.excess_threshold", v);
    if (auto [ok, v] = take("diagnostics.growth_ratio"); ok)
        cfg.growth_ratio = parse_double("diagnostics.growth_ratio", v);
    if (!(cfg.growth_ratio > 0.0))
        throw ValidationError("diagnostics.growth_ratio", "must be positive");
    if (auto [ok, v] = take("diagnostics.checkpoints"); ok) {
        cfg.checkpoints = parse_list("diagnostics.checkpoints", v);
        have_checkpoints = true;
    }
    if (!have_checkpoints) cfg.checkpoints = {cfg.t_end};
    if (auto [ok, v] = take("diagnostics.degiorgi_k"); ok)
        cfg.degiorgi_k = v == "auto" ? -1.0 : parse_double("diagnostics.degiorgi_k", v);
    if (auto [ok, v] = take("diagnostics.lp_exponents"); ok)
        cfg.lp_exponents = parse_list("diagnostics.lp_exponents", v);
    for (double e : cfg.lp_exponents)
        if (e < 1.0)
            throw ValidationError("diagnostics.lp_exponents", "must be >= 1");
    if (auto [ok, v] = take("diagnostics.holder_exponents"); ok)
        cfg.holder_exponents = parse_list("diagnostics.holder_exponents", v);
    for (double e : cfg.holder_exponents)
        if (!(e > 0.0))
            throw ValidationError("diagnostics.holder_exponents", "must be positive");

    if (!kv.empty()) throw ValidationError(kv.begin()->first, "unknown key");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Grid make_grid(const ExperimentConfig& cfg) {
    return Grid(cfg.dim, cfg.n, cfg.extent);
}

namespace {

struct Preset {
    std::string name;
    std::vector<std::vector<double>> args; // comma groups of space-separated numbers
    std::string raw_arg;                   // unparsed payload, for file paths
};

Preset parse_preset(const std::string& key, const std::string& text) {
    const std::size_t open = text.find('(');
    if (open == std::string::npos || text.back() != ')')
        throw ValidationError(key, "expected preset syntax name(...): '" + text + "'");
    Preset p;
    p.name = trim(text.substr(0, open));
    p.raw_arg = trim(text.substr(open + 1, text.size() - open - 2));
    if (p.name != "file")
        for (const std::string& group : split(p.raw_arg, ','))
            p.args.push_back(parse_list(key, group));
    return p;
}

std::array<double, 2> preset_center(const std::string& key,
                                    const std::vector<double>& vals, int dim) {
    if (vals.size() != static_cast<std::size_t>(dim))
        throw ValidationError(key, "preset center needs dim coordinates");
    return {vals[0], dim == 2 ? vals[1] : 0.0};
}

double gauss(const Grid& g, std::size_t i, std::array<double, 2> c, double w) {
    const auto pos = g.position(i);
    double d2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) d2 += (pos[a] - c[a]) * (pos[a] - c[a]);
    return std::exp(-d2 / (2.0 * w * w));
}

} // namespace

PhysParams make_params(const ExperimentConfig& cfg, const Grid& grid) {
    const Preset sp = parse_preset("params.source", cfg.source);
    ScalarField S(grid);
    if (sp.name == "constant") {
        if (sp.args.size() != 1 || sp.args[0].size() != 1)
            throw ValidationError("params.source", "constant needs one value");
        std::fill(S.values.begin(), S.values.end(), sp.args[0][0]);
    } else if (sp.name == "gaussian") {
        if (sp.args.size() != 3 || sp.args[1].size() != 1 || sp.args[2].size() != 1)
            throw ValidationError("params.source",
                                  "gaussian needs (center, width, amplitude)");
        const auto c = preset_center("params.source", sp.args[0], grid.dim());
        const double w = sp.args[1][0], a = sp.args[2][0];
        if (!(w > 0.0)) throw ValidationError("params.source", "width must be positive");
        for (std::size_t i = 0; i < S.size(); ++i) S[i] = a * gauss(grid, i, c, w);
    } else if (sp.name == "file") {
        const Snapshot snap = read_snapshot(sp.raw_arg);
        if (snap.grid != grid)
            throw ValidationError("params.source", "snapshot grid mismatch");
        S = snap.p;
    } else {
        throw ValidationError("params.source", "unknown preset '" + sp.name + "'");
    }

    const Preset mp = parse_preset("params.m0", cfg.m0);
    VectorField m0(grid);
    if (mp.name == "constant") {
        if (mp.args.size() != 1 ||
            (mp.args[0].size() != 1 &&
             mp.args[0].size() != static_cast<std::size_t>(grid.dim())))
            throw ValidationError("params.m0", "constant needs 1 or dim values");
        for (int d = 0; d < grid.dim(); ++d) {
            const double a = mp.args[0][mp.args[0].size() == 1 ? 0 : d];
            std::fill(m0.comp[d].values.begin(), m0.comp[d].values.end(), a);
        }
    } else if (mp.name == "bump_vector") {
        if (mp.args.size() != 3 || mp.args[1].size() != 1 ||
            (mp.args[2].size() != 1 &&
             mp.args[2].size() != static_cast<std::size_t>(grid.dim())))
            throw ValidationError("params.m0",
                                  "bump_vector needs (center, width, amplitudes)");
        const auto c = preset_center("params.m0", mp.args[0], grid.dim());
        const double w = mp.args[1][0];
        if (!(w > 0.0)) throw ValidationError("params.m0", "width must be positive");
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            const double gv = gauss(grid, i, c, w);
            for (int d = 0; d < grid.dim(); ++d)
                m0.comp[d][i] = mp.args[2][mp.args[2].size() == 1 ? 0 : d] * gv;
        }
    } else if (mp.name == "file") {
        const Snapshot snap = read_snapshot(mp.raw_arg);
        if (snap.grid != grid) throw ValidationError("params.m0", "snapshot grid mismatch");
        m0 = snap.m;
    } else {
        throw ValidationError("params.m0", "unknown preset '" + mp.name + "'");
    }
    // initial conductance carries homogeneous Dirichlet data
    for (std::size_t i = 0; i < grid.node_count(); ++i)
        if (grid.on_boundary(i))
            for (int d = 0; d < grid.dim(); ++d) m0.comp[d][i] = 0.0;

    PhysParams params(std::move(S), std::move(m0));
    params.D = cfg.D;
    params.E = cfg.E;
    params.gamma = cfg.gamma;
    for (double& v : params.S.values) v *= cfg.scale;
    for (int d = 0; d < grid.dim(); ++d)
        for (double& v : params.m0.comp[d].values) v *= cfg.scale;
    params.validate();
    return params;
}

RunConfig make_run_config(const ExperimentConfig& cfg) {
    RunConfig rc;
    rc.dt = cfg.dt;
    rc.t_end = cfg.t_end;
    rc.store_every = cfg.store_every;
    rc.cg_tol = cfg.cg_tol;
    rc.eps_reg = cfg.eps_reg;
    rc.blowup_threshold = cfg.blowup_threshold;
    rc.reaction_mode = cfg.reaction;
    return rc;
}

} // namespace netform
