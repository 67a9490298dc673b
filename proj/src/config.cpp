#include "qbm/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qbm {

using nlohmann::json;

namespace {

Vec2 vec2_from(const json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

Mat2 mat2_from(const json& j) {
    return {j.at(0).at(0).get<double>(), j.at(0).at(1).get<double>(),
            j.at(1).at(0).get<double>(), j.at(1).at(1).get<double>()};
}

json vec2_to(const Vec2& v) { return json::array({v.x, v.p}); }

json mat2_to(const Mat2& m) {
    return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ForcingSpec ForcingConfig::to_spec() const {
    ForcingSpec spec;
    if (kind == "external") spec = ForcingSpec::external(force);
    else if (kind == "linear") spec = ForcingSpec::linear(kmat);
    else if (kind == "quadratic") spec = ForcingSpec::quadratic(k1);
    else if (kind == "cubic") spec = ForcingSpec::cubic(k2);
    else if (kind == "general") {
        std::vector<ForcingTerm> terms;
        for (const auto& g : general) {
            double c = g.coeff;
            terms.push_back({g.d, g.b, [c](double) { return c; }});
        }
        spec = ForcingSpec::general_poly(std::move(terms));
    } else {
        throw std::runtime_error("ForcingConfig: no spec for kind '" + kind + "'");
    }
    spec.classical_characteristics_only = classical_characteristics_only;
    return spec;
}

RunConfig parse_config(const std::string& json_text) {
    json j = json::parse(json_text);
    RunConfig c;
    if (j.contains("model")) {
        const json& m = j.at("model");
        if (m.contains("family")) c.model.family = family_from_name(m.at("family").get<std::string>());
        get_if(m, "gamma0", c.model.gamma0);
        get_if(m, "cutoff", c.model.cutoff);
        get_if(m, "temperature", c.model.temperature);
        get_if(m, "mass", c.model.mass);
        get_if(m, "omega", c.model.omega);
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        get_if(g, "t_max", c.t_max);
        get_if(g, "dt", c.dt);
        get_if(g, "master_dt", c.master_dt);
    }
    if (j.contains("forcing")) {
        const json& f = j.at("forcing");
        get_if(f, "kind", c.forcing.kind);
        if (f.contains("force")) c.forcing.force = vec2_from(f.at("force"));
        if (f.contains("kmat")) c.forcing.kmat = mat2_from(f.at("kmat"));
        get_if(f, "k1", c.forcing.k1);
        get_if(f, "k2", c.forcing.k2);
        get_if(f, "classical_characteristics_only", c.forcing.classical_characteristics_only);
        if (f.contains("general"))
            for (const auto& t : f.at("general"))
                c.forcing.general.push_back({t.at("d").get<int>(), t.at("b").get<int>(),
                                             t.at("coeff").get<double>()});
    }
    if (j.contains("wigner")) {
        const json& w = j.at("wigner");
        get_if(w, "x_min", c.wigner.x_min);
        get_if(w, "x_max", c.wigner.x_max);
        get_if(w, "p_min", c.wigner.p_min);
        get_if(w, "p_max", c.wigner.p_max);
        get_if(w, "nx", c.wigner.nx);
        get_if(w, "np", c.wigner.np);
        if (w.contains("mean")) c.wigner.mean = vec2_from(w.at("mean"));
        if (w.contains("covariance")) c.wigner.covariance = mat2_from(w.at("covariance"));
    }
    if (j.contains("oracle")) {
        const json& o = j.at("oracle");
        get_if(o, "n", c.oracle.n);
        get_if(o, "seed", c.oracle.seed);
    }
    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        get_if(o, "directory", c.outputs.directory);
        get_if(o, "snapshot_stride", c.outputs.snapshot_stride);
        get_if(o, "binary_snapshots", c.outputs.binary_snapshots);
    }
    get_if(j, "degree_cap", c.degree_cap);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<Diagnostic> validate(const RunConfig& c) {
    std::vector<Diagnostic> d;
    auto err = [&](const std::string& path, const std::string& msg) {
        d.push_back({path, msg, false});
    };
    auto warn = [&](const std::string& path, const std::string& msg) {
        d.push_back({path, msg, true});
    };

    if (c.model.mass <= 0.0) err("model.mass", "must be positive");
    if (c.model.omega <= 0.0) err("model.omega", "must be positive");
    if (c.model.gamma0 < 0.0) err("model.gamma0", "must be nonnegative");
    if (c.model.temperature < 0.0) err("model.temperature", "must be nonnegative");
    if (!c.model.is_local() && c.model.cutoff <= 0.0) err("model.cutoff", "must be positive");
    if (c.model.is_local() && c.model.temperature == 0.0)
        err("model.temperature", "the local family at T = 0 has a UV-divergent noise kernel");

    if (c.dt <= 0.0) err("grid.dt", "must be positive");
    if (c.t_max <= 0.0) err("grid.t_max", "must be positive");
    if (c.dt > 0.0 && c.t_max > 0.0) {
        double steps = c.t_max / c.dt;
        if (std::abs(steps - std::llround(steps)) > 1e-9 * std::max(1.0, steps))
            err("grid.t_max", "must be an integer multiple of grid.dt");
        double ratio = c.master_dt / c.dt;
        if (c.master_dt <= 0.0) err("grid.master_dt", "must be positive");
        else if (std::abs(ratio - std::llround(ratio)) > 1e-9 * std::max(1.0, ratio))
            err("grid.master_dt", "must be an integer multiple of grid.dt");
        else if (c.master_dt > c.t_max) err("grid.master_dt", "must not exceed grid.t_max");

        double rate = std::max({c.model.omega, c.model.gamma0,
                                c.model.is_local() ? 0.0 : c.model.cutoff});
        if (rate > 0.0 && c.dt * rate > 0.1) {
            std::ostringstream msg;
            msg << "dt = " << c.dt << " exceeds the resolution bound 0.1/max(omega, gamma0, cutoff) = "
                << 0.1 / rate;
            warn("grid.dt", msg.str());
        }
    }

    static const std::set<std::string> kinds = {"none",  "external", "linear",
                                                "quadratic", "cubic", "general"};
    if (!kinds.count(c.forcing.kind))
        err("forcing.kind", "unknown kind '" + c.forcing.kind + "'");
    if (c.forcing.kind == "general") {
        for (std::size_t i = 0; i < c.forcing.general.size(); ++i) {
            const auto& g = c.forcing.general[i];
            if (g.d < 1 && g.b < 1)
                err("forcing.general[" + std::to_string(i) + "]", "needs d >= 1 or b >= 1");
            if (g.d < 0 || g.b < 0)
                err("forcing.general[" + std::to_string(i) + "]", "d and b must be nonnegative");
        }
        if (c.forcing.general.empty()) err("forcing.general", "must not be empty");
    }

    if (c.wigner.nx < 3 || c.wigner.np < 3) err("wigner.nx", "grid needs at least 3 points per axis");
    if (c.wigner.x_max <= c.wigner.x_min) err("wigner.x_max", "must exceed wigner.x_min");
    if (c.wigner.p_max <= c.wigner.p_min) err("wigner.p_max", "must exceed wigner.p_min");
    if (c.wigner.covariance.det() <= 0.0 || c.wigner.covariance(0, 0) <= 0.0)
        err("wigner.covariance", "must be symmetric positive definite");
    else {
        double sx = std::sqrt(c.wigner.covariance(0, 0));
        double sp = std::sqrt(c.wigner.covariance(1, 1));
        if (c.wigner.mean.x - 6 * sx < c.wigner.x_min || c.wigner.mean.x + 6 * sx > c.wigner.x_max)
            err("wigner.x_min", "window must cover mean_x +- 6 sigma_x");
        if (c.wigner.mean.p - 6 * sp < c.wigner.p_min || c.wigner.mean.p + 6 * sp > c.wigner.p_max)
            err("wigner.p_min", "window must cover mean_p +- 6 sigma_p");
    }

    if (c.oracle.n == 0) err("oracle.n", "must be positive");
    if (c.outputs.snapshot_stride == 0) err("outputs.snapshot_stride", "must be positive");
    if (c.outputs.directory.empty()) err("outputs.directory", "must not be empty");
    if (c.degree_cap < 2 || c.degree_cap > 16) err("degree_cap", "must be in [2, 16]");
    return d;
}

std::string config_echo(const RunConfig& c) {
    json j;
    j["model"] = {{"family", family_name(c.model.family)}, {"gamma0", c.model.gamma0},
                  {"cutoff", c.model.cutoff},              {"temperature", c.model.temperature},
                  {"mass", c.model.mass},                  {"omega", c.model.omega}};
    j["grid"] = {{"t_max", c.t_max}, {"dt", c.dt}, {"master_dt", c.master_dt}};
    json f = {{"kind", c.forcing.kind},
              {"force", vec2_to(c.forcing.force)},
              {"kmat", mat2_to(c.forcing.kmat)},
              {"k1", c.forcing.k1},
              {"k2", c.forcing.k2},
              {"classical_characteristics_only", c.forcing.classical_characteristics_only}};
    json gen = json::array();
    for (const auto& g : c.forcing.general)
        gen.push_back({{"d", g.d}, {"b", g.b}, {"coeff", g.coeff}});
    f["general"] = gen;
    j["forcing"] = f;
    j["wigner"] = {{"x_min", c.wigner.x_min},  {"x_max", c.wigner.x_max},
                   {"p_min", c.wigner.p_min},  {"p_max", c.wigner.p_max},
                   {"nx", c.wigner.nx},        {"np", c.wigner.np},
                   {"mean", vec2_to(c.wigner.mean)},
                   {"covariance", mat2_to(c.wigner.covariance)}};
    j["oracle"] = {{"n", c.oracle.n}, {"seed", c.oracle.seed}};
    j["outputs"] = {{"directory", c.outputs.directory},
                    {"snapshot_stride", c.outputs.snapshot_stride},
                    {"binary_snapshots", c.outputs.binary_snapshots}};
    j["degree_cap"] = c.degree_cap;
    return j.dump(2);
}

std::uint64_t config_hash(const RunConfig& c) {
    std::string s = config_echo(c);
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string config_hash_hex(const RunConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash(c)));
    return std::string(buf);
}

}  // namespace qbm
