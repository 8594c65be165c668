#include "dsice/config.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "dsice/errors.hpp"

namespace dsice {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) throw ValidationError(where + ": expected a number, got '" + s + "'");
    return v;
}

long long to_int(const std::string& s, const std::string& where) {
    long long v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) throw ValidationError(where + ": expected an integer, got '" + s + "'");
    return v;
}

bool to_bool(const std::string& s, const std::string& where) {
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    throw ValidationError(where + ": expected true or false, got '" + s + "'");
}

struct Key {
    std::string section, name;
    std::function<void(ModelConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const ModelConfig&)> get;
    bool hashed = true;
};

template <class F>
Key real(std::string sec, std::string name, F field) {
    return {sec, name,
            [field](ModelConfig& c, const std::string& v, const std::string& w) { field(c) = to_double(v, w); },
            [field](const ModelConfig& c) { return fmt(field(const_cast<ModelConfig&>(c))); }};
}

template <class F>
Key integer(std::string sec, std::string name, F field) {
    return {sec, name,
            [field](ModelConfig& c, const std::string& v, const std::string& w) {
                const long long x = to_int(v, w);
                if (x < -2147483647LL || x > 2147483647LL) throw ValidationError(w + ": integer out of range");
                field(c) = static_cast<int>(x);
            },
            [field](const ModelConfig& c) { return std::to_string(field(const_cast<ModelConfig&>(c))); }};
}

const std::vector<Key>& keys() {
    static const std::vector<Key> k = [] {
        std::vector<Key> v;
        v.push_back(real("exogenous", "A0", [](ModelConfig& c) -> double& { return c.params.exo.A0; }));
        v.push_back(real("exogenous", "alpha1", [](ModelConfig& c) -> double& { return c.params.exo.alpha1; }));
        v.push_back(real("exogenous", "alpha2", [](ModelConfig& c) -> double& { return c.params.exo.alpha2; }));
        v.push_back(real("exogenous", "sigma0", [](ModelConfig& c) -> double& { return c.params.exo.sigma0; }));
        v.push_back(real("exogenous", "theta2", [](ModelConfig& c) -> double& { return c.params.exo.theta2; }));

        v.push_back(real("economy", "alpha", [](ModelConfig& c) -> double& { return c.params.econ.alpha; }));
        v.push_back(real("economy", "delta", [](ModelConfig& c) -> double& { return c.params.econ.delta; }));
        v.push_back(real("economy", "pi1", [](ModelConfig& c) -> double& { return c.params.econ.pi1; }));
        v.push_back(real("economy", "pi2", [](ModelConfig& c) -> double& { return c.params.econ.pi2; }));

        v.push_back(real("climate", "phi12", [](ModelConfig& c) -> double& { return c.params.climate.phi12; }));
        v.push_back(real("climate", "phi23", [](ModelConfig& c) -> double& { return c.params.climate.phi23; }));
        v.push_back(real("climate", "xi1", [](ModelConfig& c) -> double& { return c.params.climate.xi1; }));
        v.push_back(real("climate", "varphi12", [](ModelConfig& c) -> double& { return c.params.climate.varphi12; }));
        v.push_back(real("climate", "varphi21", [](ModelConfig& c) -> double& { return c.params.climate.varphi21; }));
        v.push_back(real("climate", "eta", [](ModelConfig& c) -> double& { return c.params.climate.eta; }));
        v.push_back(real("climate", "MAT_star", [](ModelConfig& c) -> double& { return c.params.climate.MAT_star; }));
        v.push_back(real("climate", "xi3", [](ModelConfig& c) -> double& { return c.params.climate.xi3; }));
        v.push_back(real("climate", "Mtilde_AT", [](ModelConfig& c) -> double& { return c.params.climate.Mtilde_AT; }));
        v.push_back(real("climate", "Mtilde_UO", [](ModelConfig& c) -> double& { return c.params.climate.Mtilde_UO; }));
        v.push_back(real("climate", "Mtilde_LO", [](ModelConfig& c) -> double& { return c.params.climate.Mtilde_LO; }));

        v.push_back(real("growth", "varrho", [](ModelConfig& c) -> double& { return c.growth.varrho; }));
        v.push_back(real("growth", "r", [](ModelConfig& c) -> double& { return c.growth.r; }));
        v.push_back(real("growth", "varsigma", [](ModelConfig& c) -> double& { return c.growth.varsigma; }));
        v.push_back(integer("growth", "n_zeta", [](ModelConfig& c) -> int& { return c.growth.n_zeta; }));
        v.push_back(integer("growth", "n_chi", [](ModelConfig& c) -> int& { return c.growth.n_chi; }));

        v.push_back({"tipping", "enabled",
                     [](ModelConfig& c, const std::string& s, const std::string& w) { c.tipping.enabled = to_bool(s, w); },
                     [](const ModelConfig& c) { return std::string(c.tipping.enabled ? "true" : "false"); }});
        v.push_back(real("tipping", "lambda", [](ModelConfig& c) -> double& { return c.tipping.lambda; }));
        v.push_back(real("tipping", "T_floor", [](ModelConfig& c) -> double& { return c.tipping.T_floor; }));
        v.push_back(real("tipping", "Jbar_inf", [](ModelConfig& c) -> double& { return c.tipping.Jbar_inf; }));
        v.push_back(real("tipping", "q", [](ModelConfig& c) -> double& { return c.tipping.q; }));
        v.push_back(real("tipping", "Dbar", [](ModelConfig& c) -> double& { return c.tipping.Dbar; }));

        v.push_back(real("preferences", "beta", [](ModelConfig& c) -> double& { return c.params.prefs.beta; }));
        v.push_back(real("preferences", "psi", [](ModelConfig& c) -> double& { return c.params.prefs.psi; }));
        v.push_back(real("preferences", "gamma", [](ModelConfig& c) -> double& { return c.params.prefs.gamma; }));

        static const char* dims[] = {"K", "M_AT", "M_UO", "M_LO", "T_AT", "T_OC"};
        for (int d = 0; d < kStateDim; ++d)
            v.push_back(real("initial", dims[d], [d](ModelConfig& c) -> double& { return c.initial.x[d]; }));

        v.push_back(integer("solver", "horizon", [](ModelConfig& c) -> int& { return c.solver.horizon; }));
        v.push_back(integer("solver", "degree", [](ModelConfig& c) -> int& { return c.solver.degree; }));
        v.push_back({"solver", "nodes",
                     [](ModelConfig& c, const std::string& s, const std::string& w) {
                         std::vector<int> n;
                         std::stringstream ss(s);
                         std::string item;
                         while (std::getline(ss, item, ',')) {
                             const auto b = item.find_first_not_of(" \t");
                             const auto e = item.find_last_not_of(" \t");
                             n.push_back(static_cast<int>(to_int(b == std::string::npos ? "" : item.substr(b, e - b + 1), w)));
                         }
                         if (n.size() == 1) n.assign(kStateDim, n[0]);
                         if (n.size() != kStateDim) throw ValidationError(w + ": expected 1 or 6 node counts");
                         for (int d = 0; d < kStateDim; ++d) c.solver.nodes[d] = n[d];
                     },
                     [](const ModelConfig& c) {
                         std::string s;
                         for (int d = 0; d < kStateDim; ++d) s += (d ? "," : "") + std::to_string(c.solver.nodes[d]);
                         return s;
                     }});
        v.push_back(integer("solver", "tail_years", [](ModelConfig& c) -> int& { return c.solver.tail.years; }));
        v.push_back(real("solver", "tail_consumption_ratio",
                         [](ModelConfig& c) -> double& { return c.solver.tail.consumption_ratio; }));
        v.push_back(real("solver", "s_max", [](ModelConfig& c) -> double& { return c.solver.s_max; }));
        v.push_back(integer("solver", "starts", [](ModelConfig& c) -> int& { return c.solver.starts; }));
        v.push_back(real("solver", "opt_tol", [](ModelConfig& c) -> double& { return c.solver.opt_tol; }));
        v.push_back(integer("solver", "max_iterations", [](ModelConfig& c) -> int& { return c.solver.max_iterations; }));
        v.push_back(real("solver", "excursion_tol", [](ModelConfig& c) -> double& { return c.solver.excursion_tol; }));
        v.push_back(real("solver", "fit_warn", [](ModelConfig& c) -> double& { return c.solver.fit_warn; }));
        v.push_back(integer("solver", "pilot_paths", [](ModelConfig& c) -> int& { return c.solver.pilot_paths; }));
        v.push_back({"solver", "pilot_seed",
                     [](ModelConfig& c, const std::string& s, const std::string& w) {
                         const long long x = to_int(s, w);
                         if (x < 0) throw ValidationError(w + ": seed must be non-negative");
                         c.solver.pilot_seed = static_cast<std::uint64_t>(x);
                     },
                     [](const ModelConfig& c) { return std::to_string(c.solver.pilot_seed); }});
        v.push_back({"solver", "refine_boxes",
                     [](ModelConfig& c, const std::string& s, const std::string& w) { c.solver.refine_boxes = to_bool(s, w); },
                     [](const ModelConfig& c) { return std::string(c.solver.refine_boxes ? "true" : "false"); }});
        v.push_back(real("solver", "box_margin", [](ModelConfig& c) -> double& { return c.solver.box_margin; }));
        v.push_back(real("solver", "floor_logK", [](ModelConfig& c) -> double& { return c.solver.floor_logK; }));
        v.push_back(real("solver", "floor_M", [](ModelConfig& c) -> double& { return c.solver.floor_M; }));
        v.push_back(real("solver", "floor_T", [](ModelConfig& c) -> double& { return c.solver.floor_T; }));
        v.push_back({"solver", "separable",
                     [](ModelConfig& c, const std::string& s, const std::string& w) { c.solver.separable = to_bool(s, w); },
                     [](const ModelConfig& c) { return std::string(c.solver.separable ? "true" : "false"); }});
        Key workers = integer("solver", "workers", [](ModelConfig& c) -> int& { return c.solver.workers; });
        workers.hashed = false;
        v.push_back(workers);

        auto sim = [&](Key k) {
            k.hashed = false;
            v.push_back(std::move(k));
        };
        sim(integer("simulate", "n_paths", [](ModelConfig& c) -> int& { return c.simulate.n_paths; }));
        sim({"simulate", "seed",
             [](ModelConfig& c, const std::string& s, const std::string& w) {
                 const long long x = to_int(s, w);
                 if (x < 0) throw ValidationError(w + ": seed must be non-negative");
                 c.simulate.seed = static_cast<std::uint64_t>(x);
             },
             [](const ModelConfig& c) { return std::to_string(c.simulate.seed); }});
        sim({"simulate", "output_dir",
             [](ModelConfig& c, const std::string& s, const std::string&) { c.simulate.output_dir = s; },
             [](const ModelConfig& c) { return c.simulate.output_dir; }});
        sim(integer("simulate", "stats_year", [](ModelConfig& c) -> int& { return c.simulate.stats_year; }));
        sim(integer("simulate", "ar_window", [](ModelConfig& c) -> int& { return c.simulate.ar_window; }));
        return v;
    }();
    return k;
}

}  // namespace

ModelConfig parse_config(const std::string& text, const std::string& origin) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    std::map<std::string, std::map<std::string, const Key*>> index;
    for (const auto& k : keys()) index[k.section][k.name] = &k;

    ModelConfig cfg;
    for (const auto& [section, body] : tree) {
        auto sec = index.find(section);
        if (sec == index.end()) {
            if (body.empty()) throw ValidationError(origin + ": key '" + section + "' outside any section");
            throw ValidationError(origin + ": unknown section [" + section + "]");
        }
        for (const auto& [name, value] : body) {
            auto key = sec->second.find(name);
            if (key == sec->second.end())
                throw ValidationError(origin + ": unknown key '" + name + "' in [" + section + "]");
            key->second->set(cfg, value.data(), origin + ": " + section + "." + name);
        }
    }
    cfg.params.climate.derive();
    cfg.growth.horizon = cfg.solver.horizon;
    cfg.validate();
    return cfg;
}

ModelConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

std::string canonical_text(const ModelConfig& cfg) {
    std::string out;
    for (const auto& k : keys())
        if (k.hashed) out += k.section + "." + k.name + " = " + k.get(cfg) + "\n";
    return out;
}

std::string config_file_text(const ModelConfig& cfg) {
    std::string out, section;
    for (const auto& k : keys()) {
        if (k.section != section) {
            out += (section.empty() ? "[" : "\n[") + k.section + "]\n";
            section = k.section;
        }
        out += k.name + " = " + k.get(cfg) + "\n";
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalError("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

std::string config_hash(const ModelConfig& cfg) { return sha256_hex(canonical_text(cfg)); }

}  // namespace dsice
