#include "mfs/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "mfs/errors.hpp"
#include "mfs/empirical.hpp"
#include "mfs/spectrum.hpp"

namespace mfs {

using nlohmann::json;

std::string to_string(Task t) {
    switch (t) {
        case Task::Spectrum: return "spectrum";
        case Task::Census: return "census";
        case Task::Dual: return "dual";
        case Task::Empirical: return "empirical";
        case Task::Report: return "report";
    }
    return "report";
}

Task parse_task(const std::string& name) {
    for (Task t : {Task::Spectrum, Task::Census, Task::Dual, Task::Empirical, Task::Report}) {
        if (to_string(t) == name) return t;
    }
    throw ParseError("unknown task '" + name + "' (expected spectrum, census, dual, empirical or report)");
}

namespace {

// Object reader that remembers which keys were consumed.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ParseError(where() + ": expected an object");
    }

    const json* get(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    const json& need(const std::string& key) {
        const json* v = get(key);
        if (!v) throw ParseError(where() + ": missing required key '" + key + "'");
        return *v;
    }
    std::string at(const std::string& key) const { return path_ + "/" + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ParseError(at(it.key()) + ": unknown key");
        }
    }

private:
    std::string where() const { return path_.empty() ? "/" : path_; }
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Rational as_rational(const json& v, const std::string& path) {
    try {
        if (v.is_number_integer()) return Rational(Integer(static_cast<long>(v.get<long long>())));
        if (v.is_number_unsigned()) return Rational(Integer(std::to_string(v.get<unsigned long long>())));
        if (v.is_number_float()) return rational_from_double(v.get<double>());
        if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
    throw ParseError(path + ": expected a number or a rational string such as \"1/3\"");
}

Integer as_integer(const json& v, const std::string& path) {
    const Rational q = as_rational(v, path);
    if (q.get_den() != 1) throw ParseError(path + ": expected an integer");
    return q.get_num();
}

long long as_int(const json& v, const std::string& path, long long lo, long long hi) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw ParseError(path + ": expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi) {
        throw ParseError(path + ": value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
    }
    return x;
}

std::size_t as_count(const json& v, const std::string& path) {
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (x >= 1 && x <= 1e18 && x == std::floor(x)) return static_cast<std::size_t>(x);
        throw ParseError(path + ": expected a positive integer");
    }
    return static_cast<std::size_t>(as_int(v, path, 1, static_cast<long long>(1e18)));
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ParseError(path + ": expected true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ParseError(path + ": expected a string");
    return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
    if (!v.is_array()) throw ParseError(path + ": expected an array");
    return v;
}

std::vector<double> as_doubles(const json& v, const std::string& path) {
    std::vector<double> out;
    const auto& a = as_array(v, path);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        if (!a[i].is_number()) throw ParseError(p + ": expected a number");
        out.push_back(a[i].get<double>());
    }
    return out;
}

std::vector<Rational> as_rationals(const json& v, const std::string& path) {
    std::vector<Rational> out;
    const auto& a = as_array(v, path);
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_rational(a[i], path + "/" + std::to_string(i)));
    return out;
}

WeightedIFS parse_ifs(const json& j, const std::string& path) {
    Obj o(j, path);
    const int dim = static_cast<int>(o.get("ambient_dim") ? as_int(*o.get("ambient_dim"), o.at("ambient_dim"), 1, 16) : 1);
    const auto& maps = as_array(o.need("maps"), o.at("maps"));
    if (maps.empty()) throw ParseError(o.at("maps") + ": at least one map is required");
    const std::size_t l = maps.size();

    std::vector<Rational> weights;
    if (const json* w = o.get("weights")) {
        weights = as_rationals(*w, o.at("weights"));
        if (weights.size() != l) {
            throw ParseError(o.at("weights") + ": " + std::to_string(weights.size()) + " weights for " +
                             std::to_string(l) + " maps");
        }
    } else {
        weights = uniform_weights(l);
    }

    Assertions as;
    if (const json* a = o.get("assertions")) {
        Obj ao(*a, o.at("assertions"));
        if (const json* x = ao.get("osc")) as.osc = as_bool(*x, ao.at("osc"));
        if (const json* x = ao.get("esc")) as.esc = as_bool(*x, ao.at("esc"));
        if (const json* x = ao.get("dimensional_regular")) as.dimensional_regular = as_bool(*x, ao.at("dimensional_regular"));
        ao.finish();
    }

    WeightedIFS ifs;
    const json* field_j = o.get("field");
    const json* beta_j = o.get("beta");
    if (field_j || beta_j) {
        if (!field_j || !beta_j) throw ParseError(path + ": 'field' and 'beta' must be given together");
        if (dim != 1) throw ParseError(o.at("ambient_dim") + ": algebraic systems are one-dimensional");
        Obj fo(*field_j, o.at("field"));
        std::vector<Integer> minpoly;
        const auto& mp = as_array(fo.need("minimal_polynomial"), fo.at("minimal_polynomial"));
        for (std::size_t i = 0; i < mp.size(); ++i) {
            minpoly.push_back(as_integer(mp[i], fo.at("minimal_polynomial") + "/" + std::to_string(i)));
        }
        const int root = static_cast<int>(fo.get("root_index") ? as_int(*fo.get("root_index"), fo.at("root_index"), 0, 1000) : 0);
        std::optional<Integer> M;
        if (const json* mj = fo.get("M")) {
            M = as_integer(*mj, fo.at("M"));
            if (*M < 1) throw ParseError(fo.at("M") + ": must be a positive integer");
        }
        fo.finish();
        if (minpoly.size() < 2) throw ParseError(fo.at("minimal_polynomial") + ": degree must be at least 1");
        const std::size_t deg = minpoly.size() - 1;
        auto coeffs = [&](const json& v, const std::string& p) {
            std::vector<Rational> c = v.is_array() ? as_rationals(v, p) : std::vector<Rational>{as_rational(v, p)};
            if (c.size() > deg) throw ParseError(p + ": more coefficients than the field degree " + std::to_string(deg));
            c.resize(deg, Rational(0));
            return c;
        };
        const auto beta_c = coeffs(*beta_j, o.at("beta"));
        std::vector<std::vector<Rational>> a_c;
        for (std::size_t i = 0; i < l; ++i) {
            const std::string mpath = o.at("maps") + "/" + std::to_string(i);
            Obj mo(maps[i], mpath);
            a_c.push_back(coeffs(mo.need("translation"), mo.at("translation")));
            mo.finish();
        }
        if (!M) {
            // Clearing the power-basis denominators makes every translation integral.
            M = Integer(1);
            for (const auto& c : a_c) {
                for (const auto& x : c) *M = lcm(*M, x.get_den());
            }
        }
        FieldPtr field;
        try {
            field = NumberField::create(minpoly, root, *M);
        } catch (const Error& e) {
            throw ParseError(o.at("field") + ": " + e.what());
        }
        const AlgebraicNumber beta(field, beta_c);
        std::vector<AlgebraicNumber> a;
        for (auto& c : a_c) a.emplace_back(field, std::move(c));
        try {
            ifs = make_homogeneous(beta, a, weights);
        } catch (const DomainError& e) {
            throw ParseError(o.at("beta") + ": " + e.what());
        }
    } else {
        std::vector<Rational> ratios;
        std::vector<std::vector<Rational>> trans;
        std::vector<int> signs;
        std::vector<std::vector<double>> orth;
        for (std::size_t i = 0; i < l; ++i) {
            const std::string mpath = o.at("maps") + "/" + std::to_string(i);
            Obj mo(maps[i], mpath);
            ratios.push_back(as_rational(mo.need("ratio"), mo.at("ratio")));
            int sign = 1;
            if (const json* s = mo.get("sign")) {
                sign = static_cast<int>(as_int(*s, mo.at("sign"), -1, 1));
                if (sign == 0) throw ParseError(mo.at("sign") + ": must be 1 or -1");
            }
            signs.push_back(sign);
            const json& t = mo.need("translation");
            std::vector<Rational> tv = t.is_array() ? as_rationals(t, mo.at("translation"))
                                                    : std::vector<Rational>{as_rational(t, mo.at("translation"))};
            if (tv.size() != static_cast<std::size_t>(dim)) {
                throw ParseError(mo.at("translation") + ": expected " + std::to_string(dim) + " coordinates");
            }
            trans.push_back(std::move(tv));
            std::vector<double> u;
            if (const json* uj = mo.get("orthogonal")) {
                u = as_doubles(*uj, mo.at("orthogonal"));
                if (u.size() != static_cast<std::size_t>(dim * dim)) {
                    throw ParseError(mo.at("orthogonal") + ": expected " + std::to_string(dim * dim) + " entries");
                }
            }
            orth.push_back(std::move(u));
            mo.finish();
        }
        for (std::size_t i = 0; i < l; ++i) {
            if (ratios[i] <= 0) throw ParseError(o.at("maps") + "/" + std::to_string(i) + "/ratio: must be positive");
        }
        if (dim == 1) {
            std::vector<Rational> signed_r, t;
            for (std::size_t i = 0; i < l; ++i) {
                signed_r.push_back(signs[i] < 0 ? Rational(-ratios[i]) : ratios[i]);
                t.push_back(trans[i][0]);
            }
            ifs = make_rational_1d(signed_r, t, weights);
        } else {
            std::vector<double> r, t;
            for (std::size_t i = 0; i < l; ++i) {
                r.push_back(ratios[i].get_d());
                for (const auto& x : trans[i]) t.push_back(x.get_d());
            }
            std::vector<double> w;
            for (const auto& x : weights) w.push_back(x.get_d());
            ifs = make_numeric(r, t, w, dim);
            for (std::size_t i = 0; i < l; ++i) {
                ifs.maps[i].ratio_exact = ratios[i];
                ifs.maps[i].orthogonal = orth[i];
                if (signs[i] < 0) throw ParseError(o.at("maps") + "/" + std::to_string(i) +
                                                   "/sign: use 'orthogonal' for orientation in dimension > 1");
            }
            ifs.weights_exact = weights;
        }
    }
    ifs.assertions = as;
    o.finish();
    const auto rep = validate(ifs);
    if (!rep.ok) {
        std::string msg = path + ": invalid system:";
        for (const auto& s : rep.issues) msg += " " + s + ";";
        throw ParseError(msg);
    }
    return ifs;
}

std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // Keep only the reason; the location is recomputed as line and column.
        std::string what = e.what();
        const auto pos = what.find("syntax error while parsing");
        const auto colon = what.rfind(": ");
        const std::string reason = pos != std::string::npos ? what.substr(pos)
                                   : colon != std::string::npos ? what.substr(colon + 2)
                                                                : what;
        throw ParseError("syntax error at " + line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + reason);
    }
    RunConfig c;
    Obj o(root, "");
    c.ifs_json = o.need("ifs");
    c.ifs = parse_ifs(c.ifs_json, "/ifs");
    if (const json* v = o.get("task")) c.task = parse_task(as_string(*v, "/task"));
    if (const json* v = o.get("n_max")) c.n_max = static_cast<int>(as_int(*v, "/n_max", 1, 60));
    if (const json* v = o.get("q_grid")) {
        c.q_grid = as_doubles(*v, "/q_grid");
        if (c.q_grid.empty()) throw ParseError("/q_grid: must not be empty");
    }
    if (const json* v = o.get("seed")) c.seed = static_cast<std::uint64_t>(as_int(*v, "/seed", 0, INT64_MAX));
    if (const json* v = o.get("threads")) c.threads = static_cast<int>(as_int(*v, "/threads", 0, 4096));
    if (const json* v = o.get("output")) {
        Obj oo(*v, "/output");
        if (const json* x = oo.get("dir")) c.out_dir = as_string(*x, "/output/dir");
        if (const json* x = oo.get("svg")) c.svg = as_bool(*x, "/output/svg");
        oo.finish();
    }
    if (const json* v = o.get("budgets")) {
        Obj bo(*v, "/budgets");
        if (const json* x = bo.get("words")) c.word_budget = as_count(*x, "/budgets/words");
        if (const json* x = bo.get("classes")) c.class_budget = as_count(*x, "/budgets/classes");
        bo.finish();
    }
    c.empirical.q = validation_q_grid();
    if (const json* v = o.get("empirical")) {
        Obj eo(*v, "/empirical");
        if (const json* x = eo.get("n1")) c.empirical.n1 = static_cast<int>(as_int(*x, "/empirical/n1", 1, 40));
        if (const json* x = eo.get("n2")) c.empirical.n2 = static_cast<int>(as_int(*x, "/empirical/n2", 1, 40));
        if (const json* x = eo.get("guard_bits")) c.empirical.guard_bits = static_cast<int>(as_int(*x, "/empirical/guard_bits", -1, 20));
        if (const json* x = eo.get("q")) {
            c.empirical.q = as_doubles(*x, "/empirical/q");
            for (double q : c.empirical.q) {
                if (q < 0) throw ParseError("/empirical/q: empirical moments need q >= 0");
            }
        }
        eo.finish();
        if (c.empirical.n1 >= c.empirical.n2) throw ParseError("/empirical: n1 must be below n2");
    }
    if (const json* v = o.get("dual")) {
        Obj d(*v, "/dual");
        if (const json* x = d.get("property_p_depth")) c.dual.property_p_depth = static_cast<int>(as_int(*x, "/dual/property_p_depth", 1, 30));
        if (const json* x = d.get("integrality_pairs")) c.dual.integrality_pairs = as_count(*x, "/dual/integrality_pairs");
        if (const json* x = d.get("integrality_depth")) c.dual.integrality_depth = static_cast<int>(as_int(*x, "/dual/integrality_depth", 1, 60));
        if (const json* x = d.get("exhaustive_limit")) c.dual.exhaustive_limit = as_count(*x, "/dual/exhaustive_limit");
        d.finish();
    }
    if (const json* v = o.get("census")) {
        Obj co(*v, "/census");
        if (const json* x = co.get("tn_cover_refinement")) c.census.tn_cover_refinement = static_cast<int>(as_int(*x, "/census/tn_cover_refinement", 0, 8));
        if (const json* x = co.get("snapshot_in")) c.census.snapshot_in = as_string(*x, "/census/snapshot_in");
        if (const json* x = co.get("snapshot_out")) c.census.snapshot_out = as_string(*x, "/census/snapshot_out");
        co.finish();
    }
    o.finish();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

json resolved_json(const RunConfig& c) {
    json j;
    j["ifs"] = c.ifs_json;
    j["task"] = to_string(c.task);
    j["n_max"] = c.n_max;
    j["q_grid"] = c.q_grid.empty() ? default_q_grid() : c.q_grid;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["output"] = {{"dir", c.out_dir}, {"svg", c.svg}};
    j["budgets"] = {{"words", c.word_budget}, {"classes", c.class_budget}};
    j["empirical"] = {{"n1", c.empirical.n1}, {"n2", c.empirical.n2}, {"guard_bits", c.empirical.guard_bits},
                      {"q", c.empirical.q}};
    j["dual"] = {{"property_p_depth", c.dual.property_p_depth},
                 {"integrality_pairs", c.dual.integrality_pairs},
                 {"integrality_depth", c.dual.integrality_depth},
                 {"exhaustive_limit", c.dual.exhaustive_limit}};
    j["census"] = {{"tn_cover_refinement", c.census.tn_cover_refinement},
                   {"snapshot_in", c.census.snapshot_in},
                   {"snapshot_out", c.census.snapshot_out}};
    return j;
}

void apply_env_overrides(RunConfig& c) {
    auto env = [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        if (!v || !*v) return std::nullopt;
        return std::string(v);
    };
    auto number = [](const std::string& name, const std::string& v) {
        try {
            std::size_t used = 0;
            const long long x = std::stoll(v, &used);
            if (used != v.size() || x < 0) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ParseError(name + ": expected a non-negative integer, got '" + v + "'");
        }
    };
    if (auto v = env("MFS_TASK")) c.task = parse_task(*v);
    if (auto v = env("MFS_NMAX")) c.n_max = static_cast<int>(number("MFS_NMAX", *v));
    if (auto v = env("MFS_OUT")) c.out_dir = *v;
    if (auto v = env("MFS_THREADS")) c.threads = static_cast<int>(number("MFS_THREADS", *v));
    if (auto v = env("MFS_BUDGET")) c.word_budget = static_cast<std::size_t>(number("MFS_BUDGET", *v));
    if (auto v = env("MFS_SEED")) c.seed = static_cast<std::uint64_t>(number("MFS_SEED", *v));
}

}  // namespace mfs
