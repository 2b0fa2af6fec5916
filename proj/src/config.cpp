#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "dyadic/experiment.hpp"

namespace dyadic {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.begin();
    while (begin != s.end() && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
    auto end = s.end();
    while (end != begin && std::isspace(static_cast<unsigned char>(*(end - 1)))) --end;
    return std::string(begin, end);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class KeyValueMap {
public:
    explicit KeyValueMap(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw config_error("line " + std::to_string(lineno) + ": expected `key = value`");
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) {
                throw config_error("line " + std::to_string(lineno) + ": empty key");
            }
            if (!entries_.emplace(key, value).second) {
                throw config_error("duplicate key `" + key + "`");
            }
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string take(const std::string& key, const std::string& fallback) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::string value = it->second;
        entries_.erase(it);
        return value;
    }

    std::string take_required(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            throw config_error("missing required key `" + key + "`");
        }
        std::string value = it->second;
        entries_.erase(it);
        return value;
    }

    void reject_leftovers() const {
        if (!entries_.empty()) {
            throw config_error("unknown key `" + entries_.begin()->first + "`");
        }
    }

private:
    std::map<std::string, std::string> entries_;
};

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw config_error("key `" + key + "`: cannot parse `" + value + "` as a real number");
    }
}

int to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw config_error("key `" + key + "`: cannot parse `" + value + "` as an integer");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(value, &pos);
        if (pos != value.size() || value.front() == '-') throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw config_error("key `" + key + "`: cannot parse `" + value + "` as an unsigned integer");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw config_error("key `" + key + "`: expected true/false, got `" + value + "`");
}

std::array<std::int32_t, 3> to_coords(const std::string& key, const std::string& value) {
    std::array<std::int32_t, 3> coords{0, 0, 0};
    std::istringstream in(value);
    std::string part;
    std::size_t k = 0;
    while (std::getline(in, part, ',')) {
        if (k >= 3) throw config_error("key `" + key + "`: at most 3 coordinates");
        coords[k++] = to_int(key, trim(part));
    }
    if (k == 0) throw config_error("key `" + key + "`: empty coordinate list");
    return coords;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (lattice.dim < 1 || lattice.dim > 3) {
        throw config_error("key `lattice.d`: out of range (must be 1, 2, or 3)");
    }
    if (lattice.max_level < 0) {
        throw config_error("key `lattice.max_level`: out of range (must be >= 0)");
    }
    try {
        lattice.validate();
    } catch (const std::exception& e) {
        throw config_error(std::string("key `lattice.max_level`: ") + e.what());
    }
    if (!(model.alpha >= 0.0) || !std::isfinite(model.alpha)) {
        throw config_error("key `model.alpha`: out of range (must be >= 0)");
    }
    if (!(model.coupling_scale > 0.0) || !std::isfinite(model.coupling_scale)) {
        throw config_error("key `model.coupling_scale`: out of range (must be > 0)");
    }
    if (!(span.t_end >= span.t_start)) {
        throw config_error("key `span.t_end`: must be >= span.t_start");
    }
    if (!(span.dt_min > 0.0)) {
        throw config_error("key `span.dt_min`: out of range (must be > 0)");
    }
    if (span.dt_min > span.dt_max) {
        throw config_error("key `span.dt_min`: exceeds span.dt_max");
    }
    if (span.dt_init < span.dt_min || span.dt_init > span.dt_max) {
        throw config_error("key `span.dt_init`: must lie in [span.dt_min, span.dt_max]");
    }
    if (!(span.safety > 0.0) || span.safety > 1.0) {
        throw config_error("key `span.safety`: out of range (must be in (0, 1])");
    }
    if (span.rel_tol < 0.0 || span.abs_tol < 0.0 || (span.rel_tol == 0.0 && span.abs_tol == 0.0)) {
        throw config_error("key `span.rel_tol`: tolerances must be non-negative and not both zero");
    }
    if (!std::isfinite(init.amplitude)) {
        throw config_error("key `init.amplitude`: must be finite");
    }
    if (!(init.smoothness >= 0.0) || !std::isfinite(init.smoothness)) {
        throw config_error("key `init.smoothness`: out of range (must be >= 0)");
    }
    if (init.kind == InitKind::single_cube && !in_lattice(init.cube, lattice)) {
        throw config_error("key `init.cube_level`: cube outside the lattice");
    }
    if (!(analysis.badness_constant > 0.0)) {
        throw config_error("key `analysis.badness_constant`: out of range (must be > 0)");
    }
    if (!(analysis.critical_constant > 0.0)) {
        throw config_error("key `analysis.critical_constant`: out of range (must be > 0)");
    }
    const int fit_max = analysis.fit_max_level < 0 ? lattice.max_level : analysis.fit_max_level;
    if (analysis.fit_min_level < 0 || analysis.fit_min_level > fit_max || fit_max > lattice.max_level) {
        throw config_error("key `analysis.fit_min_level`: fit range must satisfy 0 <= min <= max <= max_level");
    }
    if (!std::isfinite(analysis.sobolev_beta)) {
        throw config_error("key `analysis.sobolev_beta`: must be finite");
    }
    if (output.dir.empty()) {
        throw config_error("key `output.dir`: must not be empty");
    }
    if (output.snapshot_cadence == 0) {
        throw config_error("key `output.snapshot_cadence`: out of range (must be >= 1)");
    }
    if (!(output.blowup_ceiling > 0.0)) {
        throw config_error("key `output.blowup_ceiling`: out of range (must be > 0)");
    }
}

ExperimentConfig parse_config(const std::string& text) {
    KeyValueMap map(text);
    ExperimentConfig config;

    config.lattice.dim = to_int("lattice.d", map.take_required("lattice.d"));
    config.lattice.max_level = to_int("lattice.max_level", map.take_required("lattice.max_level"));

    config.model.alpha = to_double("model.alpha", map.take_required("model.alpha"));
    config.model.dissipation_enabled = to_bool("model.dissipation", map.take("model.dissipation", "true"));
    const std::string convention = map.take("model.convention", "conservative");
    if (convention == "conservative") {
        config.model.convention = Convention::conservative;
    } else if (convention == "paper-literal") {
        config.model.convention = Convention::paper_literal;
    } else {
        throw config_error("key `model.convention`: expected conservative or paper-literal, got `" +
                           convention + "`");
    }
    config.model.coupling_scale = to_double("model.coupling_scale", map.take("model.coupling_scale", "1"));

    config.span.t_start = to_double("span.t_start", map.take("span.t_start", "0"));
    config.span.t_end = to_double("span.t_end", map.take_required("span.t_end"));
    config.span.dt_init = to_double("span.dt_init", map.take("span.dt_init", "1e-4"));
    config.span.dt_min = to_double("span.dt_min", map.take("span.dt_min", "1e-12"));
    config.span.dt_max = to_double("span.dt_max", map.take("span.dt_max", "1e-2"));
    config.span.safety = to_double("span.safety", map.take("span.safety", "0.9"));
    config.span.rel_tol = to_double("span.rel_tol", map.take("span.rel_tol", "1e-9"));
    config.span.abs_tol = to_double("span.abs_tol", map.take("span.abs_tol", "1e-14"));

    const std::string kind = map.take("init.kind", "smooth-random");
    if (kind == "single-cube") {
        config.init.kind = InitKind::single_cube;
    } else if (kind == "smooth-random") {
        config.init.kind = InitKind::smooth_random;
    } else {
        throw config_error("key `init.kind`: expected single-cube or smooth-random, got `" + kind + "`");
    }
    config.init.amplitude = to_double("init.amplitude", map.take("init.amplitude", "1"));
    config.init.smoothness = to_double("init.smoothness", map.take("init.smoothness", "2"));
    config.init.seed = to_u64("init.seed", map.take_required("init.seed"));
    config.init.cube.level = to_int("init.cube_level", map.take("init.cube_level", "0"));
    config.init.cube.coords = to_coords("init.cube_coords", map.take("init.cube_coords", "0,0,0"));

    config.analysis.badness_constant =
        to_double("analysis.badness_constant", map.take("analysis.badness_constant", "1"));
    config.analysis.critical_constant =
        to_double("analysis.critical_constant", map.take("analysis.critical_constant", "1"));
    config.analysis.fit_min_level = to_int("analysis.fit_min_level", map.take("analysis.fit_min_level", "0"));
    config.analysis.fit_max_level = to_int("analysis.fit_max_level", map.take("analysis.fit_max_level", "-1"));
    config.analysis.sobolev_beta = to_double("analysis.sobolev_beta", map.take("analysis.sobolev_beta", "1"));

    config.output.dir = map.take("output.dir", "out");
    config.output.snapshot_cadence =
        to_u64("output.snapshot_cadence", map.take("output.snapshot_cadence", "10"));
    config.output.blowup_ceiling =
        to_double("output.blowup_ceiling", map.take("output.blowup_ceiling", "1e8"));

    map.reject_leftovers();
    config.validate();
    return config;
}

std::string serialize_config(const ExperimentConfig& config) {
    std::ostringstream out;
    out << "lattice.d = " << config.lattice.dim << '\n';
    out << "lattice.max_level = " << config.lattice.max_level << '\n';
    out << "model.alpha = " << format_double(config.model.alpha) << '\n';
    out << "model.dissipation = " << (config.model.dissipation_enabled ? "true" : "false") << '\n';
    out << "model.convention = "
        << (config.model.convention == Convention::conservative ? "conservative" : "paper-literal") << '\n';
    out << "model.coupling_scale = " << format_double(config.model.coupling_scale) << '\n';
    out << "span.t_start = " << format_double(config.span.t_start) << '\n';
    out << "span.t_end = " << format_double(config.span.t_end) << '\n';
    out << "span.dt_init = " << format_double(config.span.dt_init) << '\n';
    out << "span.dt_min = " << format_double(config.span.dt_min) << '\n';
    out << "span.dt_max = " << format_double(config.span.dt_max) << '\n';
    out << "span.safety = " << format_double(config.span.safety) << '\n';
    out << "span.rel_tol = " << format_double(config.span.rel_tol) << '\n';
    out << "span.abs_tol = " << format_double(config.span.abs_tol) << '\n';
    out << "init.kind = " << (config.init.kind == InitKind::single_cube ? "single-cube" : "smooth-random")
        << '\n';
    out << "init.amplitude = " << format_double(config.init.amplitude) << '\n';
    out << "init.smoothness = " << format_double(config.init.smoothness) << '\n';
    out << "init.seed = " << config.init.seed << '\n';
    out << "init.cube_level = " << config.init.cube.level << '\n';
    out << "init.cube_coords = " << config.init.cube.coords[0] << ',' << config.init.cube.coords[1] << ','
        << config.init.cube.coords[2] << '\n';
    out << "analysis.badness_constant = " << format_double(config.analysis.badness_constant) << '\n';
    out << "analysis.critical_constant = " << format_double(config.analysis.critical_constant) << '\n';
    out << "analysis.fit_min_level = " << config.analysis.fit_min_level << '\n';
    out << "analysis.fit_max_level = " << config.analysis.fit_max_level << '\n';
    out << "analysis.sobolev_beta = " << format_double(config.analysis.sobolev_beta) << '\n';
    out << "output.dir = " << config.output.dir << '\n';
    out << "output.snapshot_cadence = " << config.output.snapshot_cadence << '\n';
    out << "output.blowup_ceiling = " << format_double(config.output.blowup_ceiling) << '\n';
    return out.str();
}

std::string content_checksum(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace dyadic
