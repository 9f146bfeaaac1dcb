#include "sssc/dataio.hpp"
#include "sssc/lowrank.hpp"
#include "sssc/metrics.hpp"
#include "sssc/pipeline.hpp"
#include "sssc/sparse_coding.hpp"
#include "sssc/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace sssc;

namespace {

py::dict report_dict(const SolverReport& r) {
    py::dict d;
    d["iterations"] = r.iterations;
    d["objective"] = r.objective;
    d["residual_norm"] = r.residual_norm;
    d["kkt_violation"] = r.kkt_violation;
    d["converged"] = r.converged;
    return d;
}

ClusterAssignment to_assignment(const std::vector<int>& labels) {
    int k = 0;
    for (int l : labels) {
        if (l < 0) throw UsageError("labels must be non-negative");
        k = std::max(k, l + 1);
    }
    return {labels, k};
}

py::dict synth(int k, int ambient, std::vector<int> dims, std::vector<int> points, double noise,
               double corrupt, std::uint64_t seed) {
    dataio::SynthParams sp;
    sp.k = k;
    sp.ambient = ambient;
    sp.dim_per = std::move(dims);
    sp.points_per = std::move(points);
    sp.noise_sigma = noise;
    sp.corrupt_frac = corrupt;
    sp.seed = seed;
    if (sp.dim_per.size() == 1) sp.dim_per.assign(static_cast<std::size_t>(k), sp.dim_per[0]);
    if (sp.points_per.size() == 1) sp.points_per.assign(static_cast<std::size_t>(k), sp.points_per[0]);
    const auto ds = dataio::synth_subspaces(sp);
    py::dict d;
    d["data"] = ds.data.values();
    d["labels"] = ds.truth.labels;
    d["corrupted"] = ds.corrupted;
    d["dims"] = ds.subspace_dims;
    return d;
}

py::dict cluster(const Matrix& data, int k, const std::string& algorithm, Index p, std::uint64_t seed,
                 std::optional<double> lambda, double gamma, int restarts,
                 std::optional<std::vector<int>> truth) {
    RunConfig cfg;
    cfg.algorithm = parse_algorithm(algorithm);
    cfg.k = k;
    cfg.p = p;
    cfg.seed = seed;
    cfg.gamma = gamma;
    cfg.restarts = restarts;
    if (lambda) {
        cfg.ssc.lambda = *lambda;
        cfg.lrr.lambda = *lambda;
    }
    std::optional<ClusterAssignment> t;
    if (truth) t = to_assignment(*truth);
    RunReport rep;
    {
        py::gil_scoped_release release;
        rep = run_pipeline(DataMatrix(data), cfg, t ? &*t : nullptr);
    }
    py::dict times;
    times["sampling"] = rep.times.sampling;
    times["in_sample_clustering"] = rep.times.in_sample_clustering;
    times["coding"] = rep.times.coding;
    times["classifying"] = rep.times.classifying;
    times["total"] = rep.times.total;
    py::dict d;
    d["labels"] = rep.labels.labels;
    d["accuracy"] = rep.accuracy ? py::cast(*rep.accuracy) : py::none();
    d["nmi"] = rep.nmi ? py::cast(*rep.nmi) : py::none();
    d["converged"] = rep.converged();
    d["in_sample"] = rep.in_sample;
    d["excluded_outliers"] = rep.excluded_outliers;
    d["times"] = times;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Scalable sparse and low-rank subspace clustering";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    m.def("synth", &synth, "Union of random subspaces; data has one sample per column.", py::arg("k"),
          py::arg("ambient"), py::arg("dims"), py::arg("points"), py::arg("noise") = 0.0,
          py::arg("corrupt") = 0.0, py::arg("seed") = 0);

    m.def("cluster", &cluster, "Run a clustering pipeline on column samples.", py::arg("data"),
          py::arg("k"), py::arg("algorithm") = "sssc", py::arg("p") = 0, py::arg("seed") = 0,
          py::arg("lam") = py::none(), py::arg("gamma") = 1e-6, py::arg("restarts") = 20,
          py::arg("truth") = py::none());

    m.def(
        "solve_lasso",
        [](const Matrix& dict, const Vector& y, double lam, double delta, double kkt_tol, int max_iter) {
            sparse::SparseSelfRepConfig cfg;
            cfg.delta = delta;
            cfg.kkt_tol = kkt_tol;
            cfg.max_iterations = max_iter;
            const auto code = sparse::solve_lasso(dict, y, lam, cfg);
            return py::make_tuple(code.coefficients, report_dict(code.report));
        },
        "min lam * ||y - D c||^2 + ||c||_1; returns (c, report).", py::arg("dict"), py::arg("y"),
        py::arg("lam") = 50.0, py::arg("delta") = 1e-3, py::arg("kkt_tol") = 1e-7,
        py::arg("max_iter") = 20000);

    m.def(
        "sparse_self_representation",
        [](const Matrix& y, double lam) {
            sparse::SparseSelfRepConfig cfg;
            cfg.lambda = lam;
            py::gil_scoped_release release;
            return sparse::sparse_self_representation(DataMatrix(y), cfg).C;
        },
        "Sparse self-representation coefficient matrix.", py::arg("y"), py::arg("lam") = 50.0);

    m.def(
        "solve_lrr",
        [](const Matrix& y, double lam, const std::string& error_norm, int max_iter) {
            lowrank::LrrConfig cfg;
            cfg.lambda = lam;
            cfg.error_norm = lowrank::parse_error_norm(error_norm);
            cfg.max_iterations = max_iter;
            lowrank::LrrSolution sol;
            {
                py::gil_scoped_release release;
                sol = lowrank::solve_lrr(DataMatrix(y), cfg);
            }
            return py::make_tuple(sol.C, sol.E, report_dict(sol.report));
        },
        "Low-rank representation; returns (C, E, report).", py::arg("y"), py::arg("lam") = 1.0,
        py::arg("error_norm") = "l21", py::arg("max_iter") = 500);

    m.def("svt", &lowrank::svt, "Singular value thresholding.", py::arg("m"), py::arg("tau"));
    m.def("l21_shrink", &lowrank::l21_shrink, "Column-wise shrinkage.", py::arg("m"), py::arg("tau"));
    m.def("nuclear_norm", &lowrank::nuclear_norm, py::arg("m"));
    m.def("outlier_columns", &lowrank::outlier_columns, py::arg("e"), py::arg("factor") = 10.0);

    m.def(
        "spectral_cluster",
        [](const Matrix& c, int k, std::uint64_t seed, int restarts) {
            spectral::SpectralOptions opts;
            opts.seed = seed;
            opts.restarts = restarts;
            return spectral::spectral_cluster(c, k, opts).labels;
        },
        "Spectral clustering of the affinity |C| + |C|^T.", py::arg("c"), py::arg("k"),
        py::arg("seed") = 0, py::arg("restarts") = 20);

    m.def(
        "uniform_split",
        [](Index n, Index p, std::uint64_t seed) {
            const auto s = dataio::uniform_split(n, p, seed);
            return py::make_tuple(s.in_sample, s.out_of_sample);
        },
        py::arg("n"), py::arg("p"), py::arg("seed") = 0);

    m.def(
        "accuracy",
        [](const std::vector<int>& pred, const std::vector<int>& truth) {
            return metrics::accuracy(to_assignment(pred), to_assignment(truth));
        },
        py::arg("pred"), py::arg("truth"));
    m.def(
        "nmi",
        [](const std::vector<int>& pred, const std::vector<int>& truth) {
            return metrics::nmi(to_assignment(pred), to_assignment(truth));
        },
        py::arg("pred"), py::arg("truth"));
}
