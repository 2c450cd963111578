#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>

#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "unijadi/cost.hpp"
#include "unijadi/diagnostics.hpp"
#include "unijadi/io.hpp"
#include "unijadi/problems.hpp"
#include "unijadi/prng.hpp"
#include "unijadi/solver.hpp"
#include "unijadi/tensor.hpp"

namespace py = pybind11;
using namespace unijadi;

namespace {

ComplexDenseTensor tensor_from_array(const py::array& arr) {
    auto a = py::array_t<cplx, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a) throw std::invalid_argument("expected a numeric array");
    std::vector<int> dims(a.ndim());
    for (py::ssize_t k = 0; k < a.ndim(); ++k) dims[k] = static_cast<int>(a.shape(k));
    std::vector<cplx> values(a.data(), a.data() + a.size());
    return ComplexDenseTensor(std::move(dims), std::move(values));
}

py::array tensor_to_array(const ComplexDenseTensor& T) {
    std::vector<py::ssize_t> shape(T.dims().begin(), T.dims().end());
    py::array_t<cplx> out(shape);
    std::copy(T.data().begin(), T.data().end(), out.mutable_data());
    return out;
}

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "gradient-max") return StrategyKind::GradientMax;
    if (name == "cyclic-threshold") return StrategyKind::CyclicThreshold;
    if (name == "cyclic") return StrategyKind::PureCyclic;
    if (name == "sd") return StrategyKind::SteepestDescent;
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxSweeps: return "MaxSweeps";
        case SolveStatus::StalledAtSaddle: return "StalledAtSaddle";
    }
    return "?";
}

SolveResult solve_wrapper(const CostFunction& cost, const Eigen::MatrixXcd& U0,
                          const std::string& strategy, double eps, int max_sweeps,
                          double delta, std::uint64_t seed, long refresh_interval) {
    SolverConfig config;
    config.strategy.kind = strategy_from_name(strategy);
    config.strategy.delta = delta;
    config.grad_tol = eps;
    config.max_sweeps = max_sweeps;
    config.seed = seed;
    if (refresh_interval > 0) config.refresh.interval = refresh_interval;
    return jacobi_g_solve(cost, U0, config);
}

}  // namespace

PYBIND11_MODULE(unijadi, m) {
    m.doc() = "Joint approximate diagonalization of complex matrices and tensors "
              "by plane rotations on the unitary group.";

    py::class_<ComplexDenseTensor>(m, "Tensor",
            "Dense complex tensor, row-major. Construct from any numpy array; "
            "numpy() converts back.")
        .def(py::init(&tensor_from_array), py::arg("array"))
        .def_property_readonly("order", &ComplexDenseTensor::order)
        .def_property_readonly("dims",
             [](const ComplexDenseTensor& T) { return T.dims(); })
        .def("numpy", &tensor_to_array)
        .def("__repr__", [](const ComplexDenseTensor& T) {
            std::ostringstream os;
            os << "Tensor(order=" << T.order() << ", dims=[";
            for (int k = 0; k < T.order(); ++k) os << (k ? ", " : "") << T.dim(k);
            os << "])";
            return os.str();
        });

    py::class_<CostFunction>(m, "CostFunction")
        .def_property_readonly("n", &CostFunction::n)
        .def_property_readonly("kind", [](const CostFunction& c) {
            return c.kind() == CostKind::SquaredModuli ? "squared" : "trace";
        })
        .def_static("squared_moduli",
            [](int n, const std::vector<std::tuple<py::array, int, double>>& terms) {
                std::vector<SquaredTerm> out;
                out.reserve(terms.size());
                for (const auto& [arr, t, alpha] : terms)
                    out.push_back({tensor_from_array(arr), t, alpha});
                return CostFunction::squared_moduli(n, std::move(out));
            },
            py::arg("n"), py::arg("terms"),
            "Weighted sum of squared multilinear forms over the columns of U. "
            "terms is a list of (tensor, t, alpha) with t conjugated slots.")
        .def_static("trace_form",
            [](int n, const py::array& B, int d) {
                return CostFunction::trace_form(n, tensor_from_array(B), d);
            },
            py::arg("n"), py::arg("B"), py::arg("d"),
            "Real trace form sum_p B(u_p..., u_p...) for Hermitian order-2d B.");

    m.def("evaluate", &evaluate, py::arg("cost"), py::arg("U"),
          "Cost value at a unitary U.");
    m.def("lambda_matrix",
          [](const CostFunction& cost, const Eigen::MatrixXcd& U) {
              return lambda_matrix(cost, rotate_full(cost, U));
          },
          py::arg("cost"), py::arg("U"),
          "Skew-Hermitian gradient coefficients at U; the Riemannian gradient "
          "is U @ lambda_matrix(cost, U).");
    m.def("off_diagonal_energy",
          [](const CostFunction& cost, const Eigen::MatrixXcd& U) {
              return off_diagonal_energy(cost, rotate_full(cost, U));
          },
          py::arg("cost"), py::arg("U"));

    py::class_<GivensRotation>(m, "GivensRotation")
        .def_readonly("c", &GivensRotation::c)
        .def_readonly("s1", &GivensRotation::s1)
        .def_readonly("s2", &GivensRotation::s2)
        .def("distance_to_identity", &GivensRotation::distance_to_identity);

    py::class_<IterationRecord>(m, "IterationRecord")
        .def_readonly("iter", &IterationRecord::iter)
        .def_readonly("sweep", &IterationRecord::sweep)
        .def_readonly("i", &IterationRecord::i)
        .def_readonly("j", &IterationRecord::j)
        .def_readonly("f", &IterationRecord::f)
        .def_readonly("grad_norm", &IterationRecord::grad_norm)
        .def_readonly("rot", &IterationRecord::rot)
        .def_readonly("gamma_gap", &IterationRecord::gamma_gap)
        .def_readonly("elapsed_s", &IterationRecord::elapsed_s);

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("U_final", &SolveResult::U_final)
        .def_readonly("f_final", &SolveResult::f_final)
        .def_readonly("grad_norm_final", &SolveResult::grad_norm_final)
        .def_readonly("trace", &SolveResult::trace)
        .def_readonly("iterations", &SolveResult::iterations)
        .def_readonly("sweeps", &SolveResult::sweeps)
        .def_property_readonly("status",
             [](const SolveResult& r) { return status_name(r.status); })
        .def_property_readonly("stalled_pair",
             [](const SolveResult& r) -> py::object {
                 if (!r.stalled_pair) return py::none();
                 return py::make_tuple(r.stalled_pair->i, r.stalled_pair->j);
             })
        .def("__repr__", [](const SolveResult& r) {
            std::ostringstream os;
            os << "SolveResult(status=" << status_name(r.status) << ", f=" << r.f_final
               << ", grad=" << r.grad_norm_final << ", iterations=" << r.iterations << ")";
            return os.str();
        });

    m.def("solve", &solve_wrapper, py::arg("cost"), py::arg("U0"),
          py::arg("strategy") = "gradient-max", py::arg("eps") = 1e-8,
          py::arg("max_sweeps") = 200, py::arg("delta") = 0.0, py::arg("seed") = 0,
          py::arg("refresh_interval") = 0,
          "Maximize the cost over unitary U starting from U0. Strategies: "
          "gradient-max, cyclic-threshold, cyclic, sd.");

    py::class_<GroundTruth>(m, "GroundTruth")
        .def_property_readonly("U_star",
             [](const GroundTruth& t) -> py::object {
                 return t.U_star ? py::cast(*t.U_star) : py::none();
             })
        .def_property_readonly("f_star",
             [](const GroundTruth& t) -> py::object {
                 return t.f_star ? py::cast(*t.f_star) : py::none();
             })
        .def_property_readonly("spectra",
             [](const GroundTruth& t) -> py::object {
                 return t.spectra ? py::cast(*t.spectra) : py::none();
             })
        .def_property_readonly("regularity_expected",
             [](const GroundTruth& t) -> py::object {
                 return t.regularity_expected ? py::cast(*t.regularity_expected)
                                              : py::none();
             })
        .def_readonly("note", &GroundTruth::note);

    py::class_<GeneratedProblem>(m, "GeneratedProblem")
        .def_readonly("cost", &GeneratedProblem::cost)
        .def_readonly("truth", &GeneratedProblem::truth);

    m.def("random_joint_matrices", &gen_random_joint_matrices,
          py::arg("n"), py::arg("L"), py::arg("seed") = 0);
    m.def("near_diagonalizable", &gen_near_diagonalizable,
          py::arg("n"), py::arg("L"), py::arg("sigma") = 0.0, py::arg("seed") = 0);
    m.def("diagonal_tensor3", &gen_diagonal_tensor3,
          py::arg("n"), py::arg("diag"), py::arg("seed") = 0, py::arg("rotate") = true);
    m.def("diagonal_trace4", &gen_diagonal_trace4,
          py::arg("n"), py::arg("diag"), py::arg("seed") = 0, py::arg("rotate") = true);
    m.def("haar_unitary",
          [](int n, std::uint64_t seed) {
              CounterRng rng(seed, 0x68616172);
              return haar_unitary(n, rng);
          },
          py::arg("n"), py::arg("seed") = 0);

    m.def("save_problem", &save_problem, py::arg("path"), py::arg("cost"));
    m.def("load_problem", &load_problem, py::arg("path"));
    m.def("finite_diff_gradient_check",
          [](const CostFunction& cost, const Eigen::MatrixXcd& U, int directions,
             double step, std::uint64_t seed) {
              return finite_diff_gradient_check(cost, U, directions, step, seed).max_rel_err;
          },
          py::arg("cost"), py::arg("U"), py::arg("directions") = 8,
          py::arg("step") = 1e-5, py::arg("seed") = 0,
          "Worst relative error of the analytic directional derivative against "
          "central finite differences.");

    py::register_exception<SchemaError>(m, "SchemaError");
}
