#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "heun/connection.hpp"
#include "heun/errors.hpp"
#include "heun/geometry.hpp"
#include "heun/io_json.hpp"
#include "heun/regions.hpp"
#include "heun/series.hpp"

using namespace heun;
using cplx = std::complex<double>;
using io::json;

namespace {

struct CommonOpts {
    std::string input;
    std::string output;
    double tolerance = 1e-10;
    int n_terms = series::default_terms;
    long seed = 0;
    std::string phi;
    std::string a_arg;
    std::string chi_arg = "0.35,0.85,1.15,0.55";
    std::string lambda_arg = "1";
};

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string piece =
            text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(piece, &used));
            if (used != piece.size()) throw std::invalid_argument(piece);
        } catch (const std::exception&) {
            throw ParseError(what + ": cannot parse \"" + piece + "\" as a number");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// "re" or "re,im"
cplx parse_complex_arg(const std::string& text, const std::string& what) {
    std::vector<double> parts = parse_reals(text, what);
    if (parts.size() == 1) return {parts[0], 0.0};
    if (parts.size() == 2) return {parts[0], parts[1]};
    throw ParseError(what + " takes one or two comma-separated numbers");
}

void check_run_limits(const CommonOpts& o) {
    if (!(o.tolerance > 0.0 && o.tolerance <= 1e-2))
        throw ParseError("--tolerance must lie in (0, 1e-2]");
    if (o.n_terms < 2) throw ParseError("--n-terms must be at least 2");
}

series::SymmetricHeunConfig make_config(const CommonOpts& o) {
    check_run_limits(o);
    if (!o.input.empty()) {
        series::SymmetricHeunConfig cfg = io::load_config(o.input);
        series::validate(cfg);
        return cfg;
    }
    if (o.phi.empty())
        throw ParseError(
            "provide a configuration with --input, or construct one with "
            "--phi and --a");
    std::vector<double> angles = parse_reals(o.phi, "--phi");
    if (angles.size() < 2 || angles.size() > 3)
        throw ParseError("--phi takes Phi1,Phi2 or Phi1,Phi2,Phi4");
    geometry::AngleTriple phis(angles[0], angles[1],
                               angles.size() == 3 ? angles[2] : 0.0);
    if (o.a_arg.empty())
        throw ParseError("--phi construction also needs --a");
    cplx a = parse_complex_arg(o.a_arg, "--a");
    cplx z3 = regions::z3_from_a(a, phis);
    std::vector<double> chis = parse_reals(o.chi_arg, "--chi");
    if (chis.size() != 4) throw ParseError("--chi takes four real values");

    series::SymmetricHeunConfig cfg;
    std::array<cplx, 3> pts = phis.points();
    cfg.z = {pts[0], pts[1], z3, pts[2]};
    cfg.chi = {cplx{chis[0]}, cplx{chis[1]}, cplx{chis[2]}, cplx{chis[3]}};
    cfg.lambda = parse_complex_arg(o.lambda_arg, "--lambda");
    series::validate(cfg);
    return cfg;
}

// Reports go to --output when given, stdout otherwise.
void emit(const json& report, const std::string& output) {
    if (output.empty())
        std::cout << io::dump(report);
    else
        io::write_json_file(output, report);
}

int cmd_params(const CommonOpts& o) {
    series::SymmetricHeunConfig cfg = make_config(o);
    series::DerivedParams dp = series::derived_params(cfg);

    json rep;
    rep["config"] = io::to_json(cfg);
    json alpha = json::array(), beta = json::array(), q = json::array();
    for (int j = 0; j < 4; ++j) {
        alpha.push_back(io::to_json(dp.alpha[j]));
        beta.push_back(io::to_json(dp.beta[j]));
        q.push_back(io::to_json(dp.q[j]));
    }
    rep["alpha"] = std::move(alpha);
    rep["beta"] = std::move(beta);
    rep["q"] = std::move(q);

    json expo = json::array();
    cplx expo_sum{};
    for (int j = 1; j <= 4; ++j) {
        auto [r1, r2] = series::indicial_exponents(cfg, j);
        expo.push_back(json::array({io::to_json(r1), io::to_json(r2)}));
        expo_sum += r1 + r2;
    }
    rep["exponents"] = std::move(expo);
    rep["exponent_sum"] = io::to_json(expo_sum);
    rep["cross_ratio_a"] =
        io::to_json(geometry::cross_ratio(cfg.z[0], cfg.z[1], cfg.z[2], cfg.z[3]));

    series::StandardFormMap map = series::standard_form_map(cfg);
    rep["standard_form"] = io::to_json(map.params);
    json nu = json::array();
    for (int j = 0; j < 4; ++j) nu.push_back(io::to_json(map.nu[j]));
    rep["nu"] = std::move(nu);
    rep["fuchs_residual"] =
        io::to_json(map.params.gamma + map.params.delta + map.params.epsilon -
                    map.params.alpha - map.params.beta - 1.0);

    emit(rep, o.output);
    return 0;
}

int cmd_connect(const CommonOpts& o, int k, int l, const std::string& at_arg) {
    series::SymmetricHeunConfig cfg = make_config(o);
    cplx at = parse_complex_arg(at_arg, "--at");
    connection::ConnectionMatrix m = connection::connection_matrix(cfg, k, l, at);

    json rep;
    rep["matrix"] = io::to_json(m);
    json report;
    report["determinant"] = io::to_json(m.determinant());
    report["dual_path_residual"] = m.dual_path_residual;
    report["reconstruction_residual"] =
        k == l ? 0.0 : connection::reconstruction_residual(cfg, m, k, l);
    rep["report"] = std::move(report);

    emit(rep, o.output);
    return 0;
}

constexpr std::array<std::pair<int, int>, 6> pair_order{
    {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};

int cmd_atlas(const CommonOpts& o) {
    series::SymmetricHeunConfig cfg = make_config(o);
    if (o.output.empty()) throw ParseError("atlas needs --output DIRECTORY");

    bool a_ok = regions::condition_a_points(cfg.z[0], cfg.z[1], cfg.z[3]);
    bool b_ok =
        a_ok && regions::condition_b_points(cfg.z[0], cfg.z[1], cfg.z[2], cfg.z[3]);
    connection::Atlas atlas = (a_ok && b_ok)
                                  ? connection::single_point_atlas(cfg)
                                  : connection::multi_center_atlas(cfg);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(o.output, ec);
    if (ec)
        throw ParseError("cannot create output directory \"" + o.output + "\"");

    json summary;
    summary["mode"] = atlas.mode == connection::AtlasMode::single_point
                          ? "single_point"
                          : "multi_center";
    summary["max_residual"] = atlas.max_residual;
    summary["config"] = io::to_json(cfg);

    json base_files = json::array();
    for (std::size_t i = 0; i < atlas.base.size(); ++i) {
        std::string name = "base_" + std::to_string(i + 1) + ".json";
        io::write_json_file((fs::path(o.output) / name).string(),
                            io::to_json(atlas.base[i]));
        base_files.push_back(name);
    }
    summary["base"] = std::move(base_files);

    json pairs = json::array();
    for (std::size_t s = 0; s < atlas.pairwise.size(); ++s) {
        auto [k, l] = pair_order[s];
        std::string name =
            "pair_" + std::to_string(k) + "_" + std::to_string(l) + ".json";
        io::write_json_file((fs::path(o.output) / name).string(),
                            io::to_json(atlas.pairwise[s]));
        json row;
        row["pair"] = json::array({k, l});
        row["file"] = name;
        row["provenance"] = atlas.provenance[s];
        row["dual_path_residual"] = atlas.pairwise[s].dual_path_residual;
        pairs.push_back(std::move(row));
    }
    summary["pairs"] = std::move(pairs);

    io::write_json_file((fs::path(o.output) / "summary.json").string(), summary);
    std::cout << io::dump(summary);
    return 0;
}

int resolve_jobs(int jobs_flag) {
    if (jobs_flag != 0) return jobs_flag;
    if (const char* env = std::getenv("HEUN_CONNECT_JOBS")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            throw ParseError("HEUN_CONNECT_JOBS must be an integer");
        }
    }
    return 0;
}

int cmd_scan(const std::string& kind, int resolution, int inner, int jobs_flag,
             const std::string& a_arg, const std::string& window,
             const std::string& output) {
    if (resolution < 8) throw ParseError("--resolution must be at least 8");
    if (inner < 8) throw ParseError("--inner-resolution must be at least 8");
    if (output.empty()) throw ParseError("scan needs --output PREFIX");

    int jobs = resolve_jobs(jobs_flag);
    if (jobs < 0) throw ParseError("--jobs must be positive");
#ifdef _OPENMP
    if (jobs > 1) omp_set_num_threads(jobs);
#endif
    regions::Exec exec = jobs == 1 ? regions::Exec::serial : regions::Exec::parallel;

    regions::RegionRaster raster;
    if (kind == "a") {
        raster = regions::scan_condition_a(resolution, resolution, exec);
    } else if (kind == "ab") {
        if (a_arg.empty()) throw ParseError("scan ab needs --a");
        cplx a = parse_complex_arg(a_arg, "--a");
        raster = regions::scan_condition_ab(a, resolution, resolution, exec);
    } else if (kind == "dmn") {
        std::vector<double> w = parse_reals(window, "--window");
        if (w.size() != 4)
            throw ParseError("--window takes re_min,re_max,im_min,im_max");
        if (!(w[0] < w[1] && w[2] < w[3]))
            throw ParseError("--window bounds must be increasing per axis");
        raster = regions::scan_dmn(w[0], w[1], w[2], w[3], resolution, resolution,
                                   inner, exec);
    } else {
        throw ParseError("scan kind must be one of: a, ab, dmn");
    }

    std::ofstream csv(output + ".csv", std::ios::binary);
    if (!csv) throw ParseError("cannot open \"" + output + ".csv\" for writing");
    regions::write_csv(raster, csv);
    std::ofstream ppm(output + ".ppm", std::ios::binary);
    if (!ppm) throw ParseError("cannot open \"" + output + ".ppm\" for writing");
    regions::write_ppm(raster, ppm);

    long true_cells = std::count(raster.cells.begin(), raster.cells.end(), 1);
    long degenerate = std::count(raster.cells.begin(), raster.cells.end(), 2);
    json summary;
    summary["kind"] = raster.kind;
    summary["resolution"] = json::array({raster.n1, raster.n2});
    summary["true_cells"] = true_cells;
    summary["degenerate_cells"] = degenerate;
    if (kind == "a")
        summary["components"] = regions::connected_components_torus(raster);
    summary["csv"] = output + ".csv";
    summary["ppm"] = output + ".ppm";
    std::cout << io::dump(summary);
    return 0;
}

struct CheckRow {
    std::string name, status, detail;
    double residual = -1.0;
    double threshold = -1.0;
};

int cmd_verify(const CommonOpts& o) {
    series::SymmetricHeunConfig cfg = make_config(o);
    const double pi = std::acos(-1.0);
    const double tol = o.tolerance;
    const int nt = o.n_terms;
    const double angle0 = 0.17 + 0.61803398874989485 * double(o.seed);

    std::vector<CheckRow> rows;
    auto run = [&rows](const std::string& name, double threshold, auto&& body) {
        CheckRow row;
        row.name = name;
        row.threshold = threshold;
        try {
            body(row);
            if (row.status.empty())
                row.status = (threshold < 0.0 || row.residual <= threshold)
                                 ? "pass"
                                 : "fail";
        } catch (const DegeneracyError& e) {
            row.status = "skipped-degenerate";
            row.detail = e.tag();
        } catch (const HeunError& e) {
            row.status = "fail";
            row.detail = e.tag();
        }
        rows.push_back(row);
    };

    // anchor: the most comfortably regular of a few deterministic candidates
    double scale = 0.0;
    for (const cplx& z : cfg.z) scale = std::max(scale, std::abs(z));
    cplx centroid = (cfg.z[0] + cfg.z[1] + cfg.z[2] + cfg.z[3]) / 4.0;
    std::array<cplx, 3> candidates{cplx{}, centroid,
                                   centroid + cplx{0.0, 0.37} * scale};
    cplx anchor{};
    double best = -1.0;
    for (const cplx& c : candidates) {
        double d = 1e300;
        for (const cplx& z : cfg.z) d = std::min(d, std::abs(z - c));
        if (d > best) {
            best = d;
            anchor = c;
        }
    }
    const double anchor_radius = best;

    run("taylor-vs-integration", 1e-8, [&](CheckRow& row) {
        cplx u = std::polar(1.0, angle0);
        cplx target = anchor + 0.45 * anchor_radius * u;
        series::LocalSolution sol =
            series::taylor_solution(cfg, anchor, 1.0, 0.0, nt);
        series::EvalResult ev = series::evaluate(sol, target, tol);
        std::array<cplx, 2> num =
            series::integrate_path(cfg, anchor, {1.0, 0.0}, target);
        row.residual = std::abs(ev.value - num[0]) / std::abs(num[0]);
    });

    for (int j = 1; j <= 4; ++j) {
        run("frobenius-vs-integration (z" + std::to_string(j) + ")", 1e-8,
            [&, j](CheckRow& row) {
                cplx zj = cfg.z[j - 1];
                cplx u = -zj / std::abs(zj);
                double worst = 0.0;
                for (series::Branch b :
                     {series::Branch::first, series::Branch::second}) {
                    series::LocalSolution sol =
                        series::frobenius_solution(cfg, j, b, nt);
                    cplx p_in = zj + 0.15 * sol.conv_radius * u;
                    cplx p_out = zj + 0.40 * sol.conv_radius * u;
                    series::EvalResult in = series::evaluate(sol, p_in, tol);
                    series::EvalResult out = series::evaluate(sol, p_out, tol);
                    std::array<cplx, 2> num = series::integrate_path(
                        cfg, p_in, {in.value, in.derivative}, p_out);
                    worst = std::max(worst, std::abs(out.value - num[0]) /
                                                std::abs(num[0]));
                }
                row.residual = worst;
            });
    }

    run("modified-wronskian-constancy", 1e-8, [&](CheckRow& row) {
        series::LocalSolution s1 =
            series::taylor_solution(cfg, anchor, 1.0, 0.0, nt);
        series::LocalSolution s2 =
            series::taylor_solution(cfg, anchor, 0.0, 1.0, nt);
        auto modified = [&](cplx z) {
            cplx p{1.0};
            for (const cplx& zj : cfg.z) p *= z - zj;
            return std::abs(series::wronskian(s1, s2, z, tol)) *
                   std::sqrt(std::abs(p));
        };
        double w0 = modified(anchor);
        double drift = 0.0;
        for (int m = 0; m < 3; ++m) {
            cplx z = anchor + 0.3 * anchor_radius *
                                  std::polar(1.0, angle0 + 2.0 * pi * m / 3.0);
            drift = std::max(drift, std::fabs(modified(z) - w0) / w0);
        }
        row.residual = drift;
    });

    run("exponent-sum", 0.0, [&](CheckRow& row) {
        cplx sum{};
        for (int j = 1; j <= 4; ++j) {
            auto [r1, r2] = series::indicial_exponents(cfg, j);
            sum += r1 + r2;
        }
        row.residual = std::abs(sum - cplx{2.0});
    });

    run("standard-form-fuchs", 1e-12, [&](CheckRow& row) {
        series::StandardFormMap map = series::standard_form_map(cfg);
        row.residual =
            std::abs(map.params.gamma + map.params.delta + map.params.epsilon -
                     map.params.alpha - map.params.beta - 1.0);
    });

    run("chain-identity", 1e-8, [&](CheckRow& row) {
        std::array<std::array<int, 3>, 4> triples{
            {{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}}};
        std::vector<cplx> points{cplx{}};
        for (const auto& t : triples) {
            try {
                points.push_back(geometry::circumcircle(cfg.z[t[0] - 1],
                                                        cfg.z[t[1] - 1],
                                                        cfg.z[t[2] - 1])
                                     .center);
            } catch (const DegeneracyError&) {
            }
        }
        bool saw_degenerate = false;
        for (const auto& t : triples)
            for (const cplx& c : points) {
                try {
                    row.residual =
                        connection::chain_check(cfg, t[0], t[1], t[2], c, c, c);
                    return;
                } catch (const DegeneracyError&) {
                    saw_degenerate = true;
                } catch (const HeunError&) {
                }
            }
        row.status = saw_degenerate ? "skipped-degenerate" : "skipped";
        row.detail = saw_degenerate ? "DegenerateExponents"
                                    : "no admissible common point";
    });

    run("recurrence-residual", 1e-12, [&](CheckRow& row) {
        double worst = series::recurrence_residual(
            series::taylor_solution(cfg, anchor, 1.0, 0.0, nt));
        try {
            for (int j = 1; j <= 4; ++j)
                for (series::Branch b :
                     {series::Branch::first, series::Branch::second})
                    worst = std::max(worst,
                                     series::recurrence_residual(
                                         series::frobenius_solution(cfg, j, b, nt)));
        } catch (const DegeneracyError&) {
        }
        row.residual = worst;
    });

    json rep;
    rep["config"] = io::to_json(cfg);
    json checks = json::array();
    bool any_fail = false;
    for (const CheckRow& row : rows) {
        json c;
        c["name"] = row.name;
        c["status"] = row.status;
        if (row.residual >= 0.0) c["residual"] = row.residual;
        if (row.threshold >= 0.0) c["threshold"] = row.threshold;
        if (!row.detail.empty()) c["detail"] = row.detail;
        checks.push_back(std::move(c));
        any_fail = any_fail || row.status == "fail";
    }
    rep["checks"] = std::move(checks);
    rep["passed"] = !any_fail;

    emit(rep, o.output);
    return any_fail ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Local series solutions and connection matrices for the symmetric "
        "four-point Heun equation"};
    app.require_subcommand(1);

    CommonOpts o;
    auto add_config_opts = [&o](CLI::App* sub) {
        sub->add_option("--input", o.input, "configuration JSON file");
        sub->add_option("--output", o.output, "output path (default: stdout)");
        sub->add_option("--phi", o.phi,
                        "unit-circle angles Phi1,Phi2[,Phi4] (Phi4 defaults to 0)");
        sub->add_option("--a", o.a_arg, "cross-ratio location re[,im]");
        sub->add_option("--chi", o.chi_arg, "four exponent parameters");
        sub->add_option("--lambda", o.lambda_arg, "accessory parameter re[,im]");
    };

    CLI::App* params =
        app.add_subcommand("params", "derived parameters, exponents, and the "
                                     "standard-form map of one configuration");
    add_config_opts(params);

    CLI::App* connect = app.add_subcommand(
        "connect", "connection matrix between two local fundamental pairs");
    add_config_opts(connect);
    int k = 0, l = 0;
    std::string at_arg = "0";
    connect->add_option("--k", k, "source singular index 1..4")->required();
    connect->add_option("--l", l, "target singular index 1..4")->required();
    connect->add_option("--at", at_arg, "common regular point re[,im]");

    CLI::App* atlas = app.add_subcommand(
        "atlas", "all pairwise connection matrices, written to a directory");
    add_config_opts(atlas);

    CLI::App* scan = app.add_subcommand(
        "scan", "feasibility-region rasters as CSV and PPM files");
    std::string kind;
    int resolution = 256, inner = 128, jobs = 0;
    std::string scan_a, window = "-1.5,2.5,-2.5,2.5";
    std::string scan_output;
    scan->add_option("kind", kind, "a | ab | dmn")->required();
    scan->add_option("--resolution", resolution, "raster cells per axis");
    scan->add_option("--inner-resolution", inner,
                     "angle grid per axis for dmn cells");
    scan->add_option("--a", scan_a, "cross-ratio location re[,im] (scan ab)");
    scan->add_option("--window", window,
                     "a-plane window re_min,re_max,im_min,im_max (scan dmn)");
    scan->add_option("--jobs", jobs,
                     "worker threads (default: all cores; HEUN_CONNECT_JOBS)");
    scan->add_option("--output", scan_output, "output prefix for .csv and .ppm");

    CLI::App* verify = app.add_subcommand(
        "verify", "run the invariant suite on one configuration");
    add_config_opts(verify);
    verify->add_option("--tolerance", o.tolerance,
                       "series evaluation tolerance, in (0, 1e-2]");
    verify->add_option("--n-terms", o.n_terms, "series truncation order");
    verify->add_option("--seed", o.seed, "sample-direction seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_parse;
    }

    try {
        if (*params) return cmd_params(o);
        if (*connect) return cmd_connect(o, k, l, at_arg);
        if (*atlas) return cmd_atlas(o);
        if (*scan)
            return cmd_scan(kind, resolution, inner, jobs, scan_a, window,
                            scan_output);
        if (*verify) return cmd_verify(o);
    } catch (const HeunError& e) {
        std::cerr << e.what() << "\n";
        return e.cli_exit_code();
    }
    return 0;
}
