#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ebql/agents.hpp"
#include "ebql/chain.hpp"
#include "ebql/estimators.hpp"
#include "ebql/mse.hpp"
#include "ebql/stats.hpp"

namespace py = pybind11;
using namespace ebql;

namespace {

SampleSet make_samples(const std::vector<std::vector<double>>& per_arm) {
    return SampleSet(per_arm);
}

Partition make_partition(const std::vector<std::vector<std::size_t>>& subsets, std::size_t n) {
    return Partition(subsets, n);
}

py::dict estimate_to_dict(const MaxMeanEstimate& e) {
    py::dict d;
    d["chosen_index"] = e.chosen_index;
    d["estimate"] = e.estimate;
    d["index_phase_count"] = e.index_phase_count;
    d["mean_phase_count"] = e.mean_phase_count;
    return d;
}

EstimatorKind kind_from_name(const std::string& name) {
    if (name == "se") return EstimatorKind::Single;
    if (name == "de") return EstimatorKind::Double;
    if (name == "wde") return EstimatorKind::WeightedDouble;
    if (name == "ee") return EstimatorKind::Ensemble;
    throw InvalidParameter("unknown estimator: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "max-mean estimation and ensemble-bootstrapped Q-learning core";

    py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
    py::register_exception<InvalidPartition>(m, "InvalidPartition", PyExc_ValueError);
    py::register_exception<UnsupportedDimension>(m, "UnsupportedDimension", PyExc_ValueError);

    m.def("normal_cdf", &normal_cdf, py::arg("x"));
    m.def("normal_pdf", &normal_pdf, py::arg("x"));
    m.def("student_t_sf", &student_t_sf, py::arg("t"), py::arg("df"));

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform01", &Rng::uniform01)
        .def("uniform_below", &Rng::uniform_below, py::arg("n"))
        .def("gaussian", &Rng::gaussian, py::arg("mean"), py::arg("std"))
        .def("gaussians", &Rng::gaussians, py::arg("mean"), py::arg("std"), py::arg("n"))
        .def("child", &Rng::child, py::arg("index"))
        .def_property_readonly("seed", &Rng::seed);

    m.def(
        "single_estimator",
        [](const std::vector<std::vector<double>>& samples) {
            return estimate_to_dict(single_estimator(make_samples(samples)));
        },
        py::arg("samples"));
    m.def(
        "double_estimator",
        [](const std::vector<std::vector<double>>& samples,
           const std::vector<std::vector<std::size_t>>& subsets, std::size_t index_subset) {
            const SampleSet s = make_samples(samples);
            return estimate_to_dict(
                double_estimator(s, make_partition(subsets, s.samples_per_arm()), index_subset));
        },
        py::arg("samples"), py::arg("subsets"), py::arg("index_subset") = 0);
    m.def(
        "weighted_double_estimator",
        [](const std::vector<std::vector<double>>& samples,
           const std::vector<std::size_t>& index_indices,
           const std::vector<std::size_t>& mean_indices) {
            return estimate_to_dict(
                weighted_double_estimator(make_samples(samples), index_indices, mean_indices));
        },
        py::arg("samples"), py::arg("index_indices"), py::arg("mean_indices"));
    m.def(
        "ensemble_estimator",
        [](const std::vector<std::vector<double>>& samples,
           const std::vector<std::vector<std::size_t>>& subsets, std::size_t k_tilde) {
            const SampleSet s = make_samples(samples);
            return estimate_to_dict(
                ensemble_estimator(s, make_partition(subsets, s.samples_per_arm()), k_tilde));
        },
        py::arg("samples"), py::arg("subsets"), py::arg("k_tilde"));

    m.def(
        "argmax_probability_2gauss",
        [](const std::vector<double>& means, const std::vector<double>& stds, int n1) {
            const auto p = argmax_probability_2gauss(GaussianSpec(means, stds), n1);
            return std::vector<double>(p.begin(), p.end());
        },
        py::arg("means"), py::arg("stds"), py::arg("n1"));
    m.def(
        "wde_statistics",
        [](const std::vector<double>& means, const std::vector<double>& stds, int n, int n1,
           const std::vector<double>& probs) {
            const auto s = wde_statistics(GaussianSpec(means, stds), n, n1, probs);
            py::dict d;
            d["bias"] = s.bias;
            d["variance"] = s.variance;
            d["mse"] = s.mse;
            d["argmax_probs"] = s.argmax_probs;
            return d;
        },
        py::arg("means"), py::arg("stds"), py::arg("n"), py::arg("n1"), py::arg("probs"));
    m.def(
        "wde_mse_2gauss",
        [](const std::vector<double>& means, const std::vector<double>& stds, int n, int n1) {
            return wde_mse_2gauss(GaussianSpec(means, stds), n, n1);
        },
        py::arg("means"), py::arg("stds"), py::arg("n"), py::arg("n1"));
    m.def(
        "optimal_split",
        [](const std::vector<double>& means, const std::vector<double>& stds, int n,
           bool monte_carlo, long trials, std::uint64_t seed) {
            McOptions mc;
            mc.trials = trials;
            mc.seed = seed;
            const SplitCurve c =
                optimal_split(GaussianSpec(means, stds), n,
                              monte_carlo ? ProbSource::MonteCarlo : ProbSource::ClosedForm, mc);
            py::dict d;
            d["n"] = c.n;
            d["n1_grid"] = c.n1_grid;
            d["mse"] = c.mse;
            d["n1_star"] = c.n1_star;
            return d;
        },
        py::arg("means"), py::arg("stds"), py::arg("n"), py::arg("monte_carlo") = false,
        py::arg("trials") = 100000, py::arg("seed") = 0);
    m.def(
        "monte_carlo_estimator_stats",
        [](const std::vector<double>& means, const std::vector<double>& stds,
           const std::string& kind, int n, int param, long trials, std::uint64_t seed,
           int jobs) {
            const auto s = monte_carlo_estimator_stats(GaussianSpec(means, stds),
                                                       kind_from_name(kind), n, param, trials,
                                                       Rng(seed), jobs);
            py::dict d;
            d["bias"] = s.bias;
            d["variance"] = s.variance;
            d["mse"] = s.mse;
            d["bias_se"] = s.bias_std_error;
            d["mse_se"] = s.mse_std_error;
            d["trials"] = s.trials;
            return d;
        },
        py::arg("means"), py::arg("stds"), py::arg("kind"), py::arg("n"), py::arg("param") = 0,
        py::arg("trials") = 100000, py::arg("seed") = 0, py::arg("jobs") = 1);

    m.def(
        "true_q",
        [](double mu, double sigma, int b_actions, double gamma) {
            const TrueQ q = true_q(ChainConfig{mu, sigma, b_actions}, gamma);
            py::dict d;
            d["a_toward_c"] = q.a_toward_c;
            d["a_toward_b"] = q.a_toward_b;
            d["b_value"] = q.b_value;
            d["optimal_a_action"] = q.optimal_a_action;
            d["optimal_a_value"] = q.optimal_a_value;
            return d;
        },
        py::arg("mu"), py::arg("sigma") = 1.0, py::arg("b_actions") = 10, py::arg("gamma") = 1.0);
}
