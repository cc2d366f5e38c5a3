#include "stdwr/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace stdwr {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& what)
{
    throw std::invalid_argument(key + ": " + what);
}

double to_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos == v.size()) {
            return d;
        }
    } catch (const std::exception&) {
    }
    bad(key, "expected a number, got '" + v + "'");
}

long to_long(const std::string& key, const std::string& v)
{
    long out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        bad(key, "expected an integer, got '" + v + "'");
    }
    return out;
}

int to_int(const std::string& key, const std::string& v)
{
    const long l = to_long(key, v);
    if (l < -1000000000L || l > 1000000000L) {
        bad(key, "integer out of range");
    }
    return static_cast<int>(l);
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    bad(key, "expected true or false, got '" + v + "'");
}

}  // namespace

AdaptConfig RunConfig::adapt_config() const
{
    AdaptConfig a;
    a.omega = omega;
    a.theta_tau = theta_tau;
    a.theta_h = theta_h;
    a.max_loops = max_loops;
    a.p = p;
    a.r = r;
    a.q = q;
    a.s = s;
    a.mode = mode;
    a.goal = goal;
    a.max_dofs = max_dofs;
    return a;
}

ProblemData RunConfig::problem() const
{
    return make_problem(preset, epsilon);
}

SpaceTimeMesh RunConfig::initial_mesh() const
{
    const auto data = problem();
    return SpaceTimeMesh::uniform(data.domain, nx, ny, data.final_time, N);
}

std::string RunConfig::stem() const
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s_eps%.0e_%s", preset == Preset::RotatingHill ? "ex1" : "ex2", epsilon,
                  mode_name(mode).c_str());
    return buf;
}

void RunConfig::validate() const
{
    if (!(epsilon > 0.0)) {
        bad("epsilon", "must be positive");
    }
    if (!(delta0 >= 0.0 && delta0 <= 1.0)) {
        bad("delta0", "must lie in [0, 1]");
    }
    if (N < 1) {
        bad("N", "must be at least 1");
    }
    if (nx < 1) {
        bad("nx", "must be at least 1");
    }
    if (ny < 1) {
        bad("ny", "must be at least 1");
    }
    if (out.empty()) {
        bad("out", "must not be empty");
    }
    adapt_config().validate();
}

RunConfig parse_config(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": empty key");
        }
        if (!kv.emplace(key, value).second) {
            bad(key, "given more than once");
        }
    }

    static const char* known[] = {"preset", "epsilon", "delta0", "omega",     "theta_tau", "theta_h",
                                  "p",      "r",       "q",      "s",         "mode",      "goal",
                                  "N",      "nx",      "ny",     "max_loops", "max_dofs",  "out",
                                  "dump"};
    for (const auto& [key, value] : kv) {
        bool ok = false;
        for (const char* k : known) {
            ok = ok || key == k;
        }
        if (!ok) {
            bad(key, "unknown key");
        }
    }

    const auto get = [&](const char* key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    RunConfig c;
    const auto* preset = get("preset");
    if (!preset) {
        bad("preset", "missing (expected ex1 or ex2)");
    }
    try {
        c.preset = parse_preset(*preset);
    } catch (const std::invalid_argument&) {
        bad("preset", "unknown preset '" + *preset + "'");
    }
    const bool ex1 = c.preset == Preset::RotatingHill;

    c.epsilon = get("epsilon") ? to_double("epsilon", *get("epsilon")) : (ex1 ? 1.0 : 1e-3);
    c.delta0 = get("delta0") ? to_double("delta0", *get("delta0")) : default_delta0(c.preset);
    c.omega = get("omega") ? to_double("omega", *get("omega")) : (ex1 ? 1.5 : 2.0);
    if (get("theta_tau")) {
        c.theta_tau = to_double("theta_tau", *get("theta_tau"));
    }
    if (get("theta_h")) {
        c.theta_h = to_double("theta_h", *get("theta_h"));
    }
    if (get("mode")) {
        try {
            c.mode = parse_mode(*get("mode"));
        } catch (const std::invalid_argument&) {
            bad("mode", "expected hoRe or hoFE, got '" + *get("mode") + "'");
        }
    }
    c.goal = ex1 ? GoalKind::L2L2 : GoalKind::FinalTime;
    if (get("goal")) {
        try {
            c.goal = parse_goal(*get("goal"));
        } catch (const std::invalid_argument&) {
            bad("goal", "expected L2L2 or FinalTime, got '" + *get("goal") + "'");
        }
    }
    if (get("p")) {
        c.p = to_int("p", *get("p"));
    }
    if (get("r")) {
        c.r = to_int("r", *get("r"));
    }
    c.q = get("q") ? to_int("q", *get("q")) : c.p + 1;
    c.s = get("s") ? to_int("s", *get("s")) : (c.mode == TemporalMode::hoRe ? c.r : c.r + 1);
    c.N = get("N") ? to_int("N", *get("N")) : (ex1 ? 25 : 10);
    const int grid = ex1 ? 4 : (c.epsilon <= 1e-6 ? 16 : 8);
    c.nx = get("nx") ? to_int("nx", *get("nx")) : grid;
    c.ny = get("ny") ? to_int("ny", *get("ny")) : grid;
    if (get("max_loops")) {
        c.max_loops = to_int("max_loops", *get("max_loops"));
    }
    if (get("max_dofs")) {
        const long m = to_long("max_dofs", *get("max_dofs"));
        if (m < 0) {
            bad("max_dofs", "must be non-negative");
        }
        c.max_dofs = static_cast<std::size_t>(m);
    }
    if (get("out")) {
        c.out = *get("out");
    }
    if (get("dump")) {
        c.dump = to_bool("dump", *get("dump"));
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read config '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string override_config(const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& values)
{
    std::istringstream in(text);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        std::string body = line;
        if (const auto hash = body.find('#'); hash != std::string::npos) {
            body.erase(hash);
        }
        const auto eq = body.find('=');
        bool drop = false;
        if (eq != std::string::npos) {
            const std::string key = trim(body.substr(0, eq));
            for (const auto& [k, v] : values) {
                drop = drop || key == k;
            }
        }
        if (!drop) {
            out += line + "\n";
        }
    }
    for (const auto& [k, v] : values) {
        if (!v.empty()) {
            out += k + " = " + v + "\n";
        }
    }
    return out;
}

std::string format_config(const RunConfig& c)
{
    char buf[1024];
    std::snprintf(buf, sizeof buf,
                  "preset = %s\nepsilon = %.17g\ndelta0 = %.17g\nomega = %.17g\ntheta_tau = %.17g\n"
                  "theta_h = %.17g\np = %d\nr = %d\nq = %d\ns = %d\nmode = %s\ngoal = %s\nN = %d\nnx = %d\n"
                  "ny = %d\nmax_loops = %d\nmax_dofs = %zu\nout = %s\ndump = %s\n",
                  c.preset == Preset::RotatingHill ? "ex1" : "ex2", c.epsilon, c.delta0, c.omega, c.theta_tau,
                  c.theta_h, c.p, c.r, c.q, c.s, mode_name(c.mode).c_str(), goal_name(c.goal).c_str(), c.N, c.nx,
                  c.ny, c.max_loops, c.max_dofs, c.out.c_str(), c.dump ? "true" : "false");
    return buf;
}

}  // namespace stdwr
