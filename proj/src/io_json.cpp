#include "heun/io_json.hpp"

#include <fstream>
#include <sstream>

namespace heun::io {

namespace {

const json& require_field(const json& j, const char* name,
                          const std::string& what) {
    if (!j.is_object())
        throw ParseError(what + " must be a JSON object");
    auto it = j.find(name);
    if (it == j.end())
        throw ParseError(what + " is missing the \"" + name + "\" field");
    return *it;
}

double number_from_json(const json& j, const std::string& what) {
    if (!j.is_number())
        throw ParseError(what + " must be a number");
    return j.get<double>();
}

int int_from_json(const json& j, const std::string& what) {
    if (!j.is_number_integer())
        throw ParseError(what + " must be an integer");
    return j.get<int>();
}

std::string string_from_json(const json& j, const std::string& what) {
    if (!j.is_string())
        throw ParseError(what + " must be a string");
    return j.get<std::string>();
}

std::array<cplx, 4> complex4_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 4)
        throw ParseError(what + " must be an array of four complex numbers");
    std::array<cplx, 4> out;
    for (int i = 0; i < 4; ++i)
        out[i] = complex_from_json(j[i], what + "[" + std::to_string(i) + "]");
    return out;
}

json complex4_to_json(const std::array<cplx, 4>& v) {
    json out = json::array();
    for (const cplx& e : v) out.push_back(to_json(e));
    return out;
}

}  // namespace

json to_json(cplx v) { return json::array({v.real(), v.imag()}); }

cplx complex_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(what + " must be a complex number as [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const series::SymmetricHeunConfig& cfg) {
    json j;
    j["z"] = complex4_to_json(cfg.z);
    j["chi"] = complex4_to_json(cfg.chi);
    j["lambda"] = to_json(cfg.lambda);
    return j;
}

series::SymmetricHeunConfig config_from_json(const json& j) {
    series::SymmetricHeunConfig cfg;
    cfg.z = complex4_from_json(require_field(j, "z", "config"), "config z");
    cfg.chi = complex4_from_json(require_field(j, "chi", "config"), "config chi");
    cfg.lambda = complex_from_json(require_field(j, "lambda", "config"),
                                   "config lambda");
    return cfg;
}

json to_json(const series::LocalSolution& sol) {
    json j;
    j["center"] = to_json(sol.center);
    j["exponent"] = to_json(sol.exponent);
    json coeffs = json::array();
    for (const cplx& c : sol.coefficients) coeffs.push_back(to_json(c));
    j["coefficients"] = std::move(coeffs);
    j["conv_radius"] = sol.conv_radius;
    j["branch_cut_direction"] = sol.branch_cut_direction;
    j["config"] = to_json(sol.config);
    j["kind"] = sol.kind == series::SeriesKind::taylor ? "taylor" : "frobenius";
    j["sing_index"] = sol.sing_index;
    j["branch"] = sol.branch == series::Branch::first ? "first" : "second";
    j["init_value"] = to_json(sol.init_value);
    j["init_slope"] = to_json(sol.init_slope);
    return j;
}

series::LocalSolution solution_from_json(const json& j) {
    series::LocalSolution sol;
    sol.center = complex_from_json(require_field(j, "center", "solution"),
                                   "solution center");
    sol.exponent = complex_from_json(require_field(j, "exponent", "solution"),
                                     "solution exponent");
    const json& coeffs = require_field(j, "coefficients", "solution");
    if (!coeffs.is_array())
        throw ParseError("solution coefficients must be an array");
    sol.coefficients.reserve(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        sol.coefficients.push_back(complex_from_json(
            coeffs[i], "solution coefficients[" + std::to_string(i) + "]"));
    sol.conv_radius = number_from_json(
        require_field(j, "conv_radius", "solution"), "solution conv_radius");
    sol.branch_cut_direction =
        number_from_json(require_field(j, "branch_cut_direction", "solution"),
                         "solution branch_cut_direction");
    sol.config = config_from_json(require_field(j, "config", "solution"));
    std::string kind =
        string_from_json(require_field(j, "kind", "solution"), "solution kind");
    if (kind == "taylor")
        sol.kind = series::SeriesKind::taylor;
    else if (kind == "frobenius")
        sol.kind = series::SeriesKind::frobenius;
    else
        throw ParseError("solution kind must be \"taylor\" or \"frobenius\"");
    sol.sing_index = int_from_json(require_field(j, "sing_index", "solution"),
                                   "solution sing_index");
    std::string branch = string_from_json(require_field(j, "branch", "solution"),
                                          "solution branch");
    if (branch == "first")
        sol.branch = series::Branch::first;
    else if (branch == "second")
        sol.branch = series::Branch::second;
    else
        throw ParseError("solution branch must be \"first\" or \"second\"");
    sol.init_value = complex_from_json(require_field(j, "init_value", "solution"),
                                       "solution init_value");
    sol.init_slope = complex_from_json(require_field(j, "init_slope", "solution"),
                                       "solution init_slope");
    return sol;
}

json to_json(const series::StandardHeunParams& p) {
    json j;
    j["a"] = to_json(p.a);
    j["q"] = to_json(p.q);
    j["alpha"] = to_json(p.alpha);
    j["beta"] = to_json(p.beta);
    j["gamma"] = to_json(p.gamma);
    j["delta"] = to_json(p.delta);
    j["epsilon"] = to_json(p.epsilon);
    return j;
}

series::StandardHeunParams standard_params_from_json(const json& j) {
    series::StandardHeunParams p;
    p.a = complex_from_json(require_field(j, "a", "params"), "params a");
    p.q = complex_from_json(require_field(j, "q", "params"), "params q");
    p.alpha = complex_from_json(require_field(j, "alpha", "params"), "params alpha");
    p.beta = complex_from_json(require_field(j, "beta", "params"), "params beta");
    p.gamma = complex_from_json(require_field(j, "gamma", "params"), "params gamma");
    p.delta = complex_from_json(require_field(j, "delta", "params"), "params delta");
    p.epsilon =
        complex_from_json(require_field(j, "epsilon", "params"), "params epsilon");
    return p;
}

json to_json(const connection::ConnectionMatrix& m) {
    json j;
    j["entries"] = complex4_to_json(m.entries);
    j["source_center"] = to_json(m.source_center);
    j["target_center"] = to_json(m.target_center);
    json conv;
    conv["eval_point"] = to_json(m.convention.eval_point);
    conv["cut_directions"] = json::array({m.convention.cut_directions[0],
                                          m.convention.cut_directions[1],
                                          m.convention.cut_directions[2],
                                          m.convention.cut_directions[3]});
    j["convention"] = std::move(conv);
    j["dual_path_residual"] = m.dual_path_residual;
    return j;
}

connection::ConnectionMatrix matrix_from_json(const json& j) {
    connection::ConnectionMatrix m;
    m.entries = complex4_from_json(require_field(j, "entries", "matrix"),
                                   "matrix entries");
    m.source_center = complex_from_json(
        require_field(j, "source_center", "matrix"), "matrix source_center");
    m.target_center = complex_from_json(
        require_field(j, "target_center", "matrix"), "matrix target_center");
    const json& conv = require_field(j, "convention", "matrix");
    m.convention.eval_point = complex_from_json(
        require_field(conv, "eval_point", "convention"), "convention eval_point");
    const json& cuts = require_field(conv, "cut_directions", "convention");
    if (!cuts.is_array() || cuts.size() != 4)
        throw ParseError("convention cut_directions must be an array of four numbers");
    for (int i = 0; i < 4; ++i)
        m.convention.cut_directions[i] = number_from_json(
            cuts[i], "convention cut_directions[" + std::to_string(i) + "]");
    m.dual_path_residual =
        number_from_json(require_field(j, "dual_path_residual", "matrix"),
                         "matrix dual_path_residual");
    return m;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open \"" + path + "\" for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ParseError("invalid JSON in \"" + path + "\": " + e.what());
    }
}

series::SymmetricHeunConfig load_config(const std::string& path) {
    return config_from_json(load_json_file(path));
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open \"" + path + "\" for writing");
    out << dump(j);
    if (!out) throw ParseError("failed writing \"" + path + "\"");
}

}  // namespace heun::io
