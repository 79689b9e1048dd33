#include "dioph/config.hpp"
#include "dioph/errors.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace dioph {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConstraintViolation, "config", what); }

double to_double(const std::string& key, const std::string& v)
{
    double x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) bad(key + ": not a number: " + v);
    return x;
}

long long to_int(const std::string& key, const std::string& v)
{
    long long x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) bad(key + ": not an integer: " + v);
    return x;
}

BigInt to_big(const std::string& key, const std::string& v)
{
    // "2^42" is accepted next to plain digits.
    const auto caret = v.find('^');
    try {
        if (caret != std::string::npos)
            return ipow(BigInt(v.substr(0, caret)), static_cast<unsigned long>(to_int(key, v.substr(caret + 1))));
        return BigInt(v);
    } catch (const std::invalid_argument&) {
        bad(key + ": not an integer: " + v);
    }
}

std::vector<Rational> to_rationals(const std::string& v)
{
    std::vector<Rational> out;
    for (const auto& x : split(v, ',')) out.push_back(parse_rational(x));
    return out;
}

std::string join(const std::vector<Rational>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
    return s;
}

std::string num(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

const char* command_name(Command c)
{
    switch (c) {
    case Command::construct: return "construct";
    case Command::measure: return "measure";
    case Command::spectrum: return "spectrum";
    case Command::dims: return "dims";
    case Command::project: return "project";
    case Command::restrict: return "restrict";
    case Command::report: return "report";
    }
    return "?";
}

Command parse_command(const std::string& s)
{
    for (auto c : {Command::construct, Command::measure, Command::spectrum, Command::dims, Command::project,
                   Command::restrict, Command::report})
        if (s == command_name(c)) return c;
    bad("unknown command " + s);
}

RunConfig parse_config(const std::string& text)
{
    RunConfig c;
    c.params.gamma = Rational(1, 4);
    c.params.betas = {Rational(1, 4)};
    c.params.stages = 2;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) bad("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (key == "command")
            c.command = parse_command(v);
        else if (key == "d")
            c.params.d = static_cast<int>(to_int(key, v));
        else if (key == "gamma")
            c.params.gamma = parse_rational(v);
        else if (key == "beta")
            c.params.betas = to_rationals(v);
        else if (key == "growth")
            c.params.growth = parse_growth(v);
        else if (key == "stages")
            c.params.stages = static_cast<int>(to_int(key, v));
        else if (key == "base")
            c.params.base = static_cast<unsigned long>(to_int(key, v));
        else if (key == "stage_mode")
            c.stage_mode = parse_mode(v);
        else if (key == "q1")
            c.q1 = to_big(key, v);
        else if (key == "q") {
            c.q_list.clear();
            for (const auto& x : split(v, ',')) c.q_list.push_back(to_big(key, x));
        } else if (key == "out")
            c.out_dir = v;
        else if (key == "cache")
            c.cache_dir = v;
        else if (key == "kmax")
            c.k_max = to_int(key, v);
        else if (key == "err_budget")
            c.err_budget = to_double(key, v);
        else if (key == "tolerance")
            c.tolerance = to_double(key, v);
        else if (key == "a") {
            c.a = parse_rational(v);
            c.nongeometric = true;
        } else if (key == "b") {
            c.b = parse_rational(v);
            c.nongeometric = true;
        } else if (key == "s")
            c.s = to_rationals(v);
        else if (key == "t")
            c.t = to_rationals(v);
        else if (key == "p_tilde")
            c.p_tilde = to_double(key, v);
        else if (key == "q_exp")
            c.q_exp = to_double(key, v);
        else if (key == "samples")
            c.samples = static_cast<std::size_t>(to_int(key, v));
        else
            bad("line " + std::to_string(lineno) + ": unknown key " + key);
    }
    if (c.k_max < 1) bad("kmax >= 1");
    if (!(c.tolerance > 0)) bad("tolerance > 0");
    if (!(c.err_budget > 0)) bad("err_budget > 0");
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) bad("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_text(const RunConfig& c)
{
    std::map<std::string, std::string> kv;
    kv["command"] = command_name(c.command);
    kv["d"] = std::to_string(c.params.d);
    kv["gamma"] = to_string(c.params.gamma);
    kv["beta"] = join(c.params.betas);
    kv["growth"] = growth_name(c.params.growth);
    kv["stages"] = std::to_string(c.params.stages);
    kv["base"] = std::to_string(c.params.base);
    kv["stage_mode"] = mode_name(c.stage_mode);
    if (c.q1) kv["q1"] = to_string(*c.q1);
    if (!c.q_list.empty()) {
        std::string s;
        for (std::size_t i = 0; i < c.q_list.size(); ++i) s += (i ? "," : "") + to_string(c.q_list[i]);
        kv["q"] = s;
    }
    kv["out"] = c.out_dir;
    kv["cache"] = c.cache_dir;
    kv["kmax"] = std::to_string(c.k_max);
    kv["err_budget"] = num(c.err_budget);
    kv["tolerance"] = num(c.tolerance);
    if (c.nongeometric) {
        kv["a"] = to_string(c.a);
        kv["b"] = to_string(c.b);
    }
    if (!c.s.empty()) kv["s"] = join(c.s);
    if (!c.t.empty()) kv["t"] = join(c.t);
    kv["p_tilde"] = num(c.p_tilde);
    kv["q_exp"] = num(c.q_exp);
    kv["samples"] = std::to_string(c.samples);
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

}  // namespace dioph
