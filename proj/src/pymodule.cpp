// Python bindings for the kdvist core library.
#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <kdvist/blocks.hpp>
#include <kdvist/discretize.hpp>
#include <kdvist/fragmentation.hpp>
#include <kdvist/kdv.hpp>
#include <kdvist/oracles.hpp>
#include <kdvist/scattering.hpp>
#include <kdvist/spectrum.hpp>
#include <kdvist/splitstep.hpp>
#include <kdvist/types.hpp>

namespace py = pybind11;
using namespace kdvist;

PYBIND11_MODULE(kdvist, m) {
    m.doc() =
        "Scattering data and large-time KdV dynamics for compactly supported, "
        "nonpositive, piecewise-constant potentials.";

    py::register_exception<invalid_input>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<numerical_error>(m, "NumericalError", PyExc_ArithmeticError);

    // ------------------------------------------------------------ blocks --
    py::class_<BlockWell>(m, "BlockWell")
        .def(py::init<>())
        .def_readwrite("depth_root", &BlockWell::depth_root)
        .def_readwrite("width", &BlockWell::width)
        .def_readwrite("right_edge", &BlockWell::right_edge)
        .def("left_edge", &BlockWell::left_edge)
        .def("depth", &BlockWell::depth)
        .def("__repr__", [](const BlockWell& w) {
            return "BlockWell(depth_root=" + std::to_string(w.depth_root) +
                   ", width=" + std::to_string(w.width) +
                   ", right_edge=" + std::to_string(w.right_edge) + ")";
        });

    py::class_<BlockPotential>(m, "BlockPotential")
        .def(py::init<>())
        .def_readwrite("wells", &BlockPotential::wells)
        .def_readwrite("grid", &BlockPotential::grid)
        .def_readwrite("offset", &BlockPotential::offset)
        .def("size", &BlockPotential::size)
        .def("span", &BlockPotential::span)
        .def("validate", &BlockPotential::validate)
        .def("__len__", &BlockPotential::size)
        .def("__repr__", [](const BlockPotential& p) {
            return "BlockPotential(" + std::to_string(p.size()) + " blocks, span " +
                   std::to_string(p.span()) + ", offset " + std::to_string(p.offset) + ")";
        });

    m.def("make_block_potential", &make_block_potential, py::arg("depth_roots"),
          py::arg("grid"), py::arg("offset") = 0.0,
          "Build a block potential from depth roots a_1..a_N (right to left) and "
          "the grid b_0..b_N in the canonical right-edge-at-zero frame.");
    m.def("single_block", &single_block, py::arg("a"), py::arg("xmin"), py::arg("xmax"),
          "Uniform well V = -a^2 on [xmin, xmax] as one block.");
    m.def("split_blocks", &split_blocks, py::arg("pot"), py::arg("parts"),
          "Split every block into `parts` equal sub-blocks (same potential).");
    m.def("potential_value", &potential_value, py::arg("pot"), py::arg("x"),
          "V(x) in original coordinates (0 outside the support).");

    // -------------------------------------------------------- discretize --
    py::class_<SampledPotential>(m, "SampledPotential")
        .def(py::init([](std::function<double(double)> v, double xmin, double xmax) {
                 return SampledPotential{std::move(v), xmin, xmax};
             }),
             py::arg("v"), py::arg("xmin"), py::arg("xmax"),
             "Wrap a callable V(x) with support [xmin, xmax].")
        .def_readwrite("xmin", &SampledPotential::xmin)
        .def_readwrite("xmax", &SampledPotential::xmax)
        .def("__call__", [](const SampledPotential& p, double x) { return p.v(x); });

    m.def("named_profile", &named_profile, py::arg("name"), py::arg("amplitude"),
          py::arg("width"), py::arg("xmin"), py::arg("xmax"),
          "Built-in profiles: 'block' (V = -amplitude) or 'sech2' "
          "(V = -amplitude * sech(x/width)^2) on [xmin, xmax].");
    m.def(
        "tabulated_profile",
        [](std::vector<std::pair<double, double>> samples) {
            return tabulated_profile(std::move(samples));
        },
        py::arg("samples"), "Piecewise-linear interpolant of (x, v) samples.");
    m.def("csv_profile", &csv_profile, py::arg("path"),
          "Tabulated profile from a two-column x,v text file.");

    py::enum_<BlockRule>(m, "BlockRule")
        .value("midpoint", BlockRule::midpoint)
        .value("cell_average", BlockRule::cell_average);

    m.def("to_blocks", &to_blocks, py::arg("profile"), py::arg("n_blocks"), py::arg("rule"),
          "Reduce a profile to n_blocks uniform blocks by midpoint sampling or "
          "cell averaging.");

    py::class_<HaarCoefficients>(m, "HaarCoefficients")
        .def(py::init<>())
        .def_readwrite("coeffs", &HaarCoefficients::coeffs)
        .def_readwrite("level", &HaarCoefficients::level);

    m.def("haar_forward", &haar_forward, py::arg("values"),
          "Coefficients in the unnormalized Haar basis (length a power of two).");
    m.def("haar_inverse", &haar_inverse, py::arg("coeffs"),
          "Exact inverse of haar_forward.");
    m.def("haar_compress", &haar_compress, py::arg("profile"), py::arg("level"),
          py::arg("threshold"),
          "Cell averages at 2^level cells, thresholded in the Haar basis, back "
          "to blocks.");

    // ------------------------------------------------------- fragmentation --
    py::class_<TransitionMatrix>(m, "TransitionMatrix")
        .def("a", &TransitionMatrix::a)
        .def("b", &TransitionMatrix::b)
        .def("R", &TransitionMatrix::R)
        .def("T", &TransitionMatrix::T)
        .def("L", &TransitionMatrix::L);

    m.def("compose_lambda", &compose_lambda, py::arg("k"), py::arg("pot"),
          "Full transition matrix of the block chain at (complex) wavenumber k; "
          "R()/T() give the right reflection and transmission coefficients.");

    // ------------------------------------------------------------ spectrum --
    py::class_<SeedEstimates>(m, "SeedEstimates")
        .def(py::init<>())
        .def_readwrite("kappas_guess", &SeedEstimates::kappas_guess)
        .def_readwrite("source", &SeedEstimates::source);

    m.def("spectral_seed", &spectral_seed, py::arg("pot"), py::arg("grid_size"),
          py::arg("xmin"), py::arg("xmax"),
          "Bound-state estimates from a Fourier pseudospectral matrix on "
          "[xmin, xmax] (must contain the support; grid_size a power of two >= 64).");

    py::enum_<BoundMethod>(m, "BoundMethod")
        .value("inv_R", BoundMethod::inv_R)
        .value("inv_B", BoundMethod::inv_B)
        .value("q_zero", BoundMethod::q_zero);

    py::class_<RootDiagnostics>(m, "RootDiagnostics")
        .def(py::init<>())
        .def_readwrite("failed_seeds", &RootDiagnostics::failed_seeds)
        .def_readwrite("discarded_exceptional", &RootDiagnostics::discarded_exceptional)
        .def_readwrite("deduplicated", &RootDiagnostics::deduplicated);

    m.def(
        "find_bound_states",
        [](const BlockPotential& pot, const SeedEstimates& seeds, BoundMethod method,
           double fine_scan_step) {
            RootDiagnostics diag;
            std::vector<double> roots = find_bound_states(pot, seeds, method, &diag,
                                                          fine_scan_step);
            return py::make_tuple(std::move(roots), std::move(diag));
        },
        py::arg("pot"), py::arg("seeds"), py::arg("method") = BoundMethod::q_zero,
        py::arg("fine_scan_step") = 0.0,
        "Polished bound states (descending) plus root diagnostics.");

    py::enum_<NormingMethod>(m, "NormingMethod")
        .value("residue", NormingMethod::residue)
        .value("ab_ratio", NormingMethod::ab_ratio);

    py::class_<DiscreteSpectrum>(m, "DiscreteSpectrum")
        .def(py::init<>())
        .def(py::init([](std::vector<double> kappas, std::vector<double> norming) {
                 DiscreteSpectrum s;
                 s.kappas = std::move(kappas);
                 s.norming = std::move(norming);
                 s.method_tags.assign(s.kappas.size(), "user");
                 return s;
             }),
             py::arg("kappas"), py::arg("norming"),
             "Assemble a spectrum directly from kappas (descending) and c^2 values.")
        .def_readwrite("kappas", &DiscreteSpectrum::kappas)
        .def_readwrite("norming", &DiscreteSpectrum::norming)
        .def_readwrite("method_tags", &DiscreteSpectrum::method_tags);

    m.def("norming_constants", &norming_constants, py::arg("pot"), py::arg("kappas"),
          py::arg("method") = NormingMethod::residue, py::arg("eta") = 1e-3,
          "c_n^2 for the given bound states, in original coordinates.");

    // --------------------------------------------------------------- kdv --
    py::class_<SolitonTrain>(m, "SolitonTrain")
        .def_readwrite("kappas", &SolitonTrain::kappas)
        .def_readwrite("norming0", &SolitonTrain::norming0)
        .def_readwrite("gammas", &SolitonTrain::gammas)
        .def_readwrite("log_sqrt_gamma", &SolitonTrain::log_sqrt_gamma)
        .def_readwrite("t", &SolitonTrain::t);

    m.def("evolve", &evolve, py::arg("spectrum"), py::arg("t"),
          "Time-advanced soliton train (kappas fixed, phase shifts from the "
          "norming constants).");
    m.def("u_asymptotic", &u_asymptotic, py::arg("train"), py::arg("xs"),
          "Sum of -2 kappa^2 sech^2 solitons at the given points.");
    m.def("log_det_kernel_matrix", &log_det_kernel_matrix, py::arg("spectrum"),
          py::arg("t"), py::arg("x"),
          "log det(I + C)(x, t) for the reflectionless kernel, evaluated in an "
          "overflow-safe scaled frame.");
    m.def("u_determinant", &u_determinant, py::arg("spectrum"), py::arg("t"),
          py::arg("xs"), py::arg("dx") = 1e-3,
          "u = -2 d^2/dx^2 log det(I + C) by central differencing.");

    py::class_<GLMKernelApprox>(m, "GLMKernelApprox")
        .def_readwrite("terms", &GLMKernelApprox::terms);
    m.def("glm_terms", &glm_terms, py::arg("spectrum"), py::arg("t"),
          "Separable kernel terms (c_n^2(t), kappa_n).");
    m.def("glm_kernel", &glm_kernel, py::arg("spectrum"), py::arg("t"), py::arg("x"),
          "F(x, t) = sum c_n^2(t) exp(-kappa_n x).");

    // --------------------------------------------------------- splitstep --
    py::class_<SplitStepResult>(m, "SplitStepResult")
        .def_readwrite("xs", &SplitStepResult::xs)
        .def_readwrite("u", &SplitStepResult::u)
        .def_readwrite("mass0", &SplitStepResult::mass0)
        .def_readwrite("mass1", &SplitStepResult::mass1)
        .def_readwrite("momentum0", &SplitStepResult::momentum0)
        .def_readwrite("momentum1", &SplitStepResult::momentum1)
        .def_readwrite("steps", &SplitStepResult::steps)
        .def_readwrite("dt", &SplitStepResult::dt);

    m.def("split_step_kdv", &split_step_kdv, py::arg("u0"), py::arg("t_end"),
          py::arg("dt"), py::arg("grid"), py::arg("pad_factor") = 4.0,
          "Strang split-step Fourier integration of u_t - 6 u u_x + u_xxx = 0 "
          "from u(x, 0) = u0 on a padded periodic box.");

    // ------------------------------------------------------------ oracles --
    py::class_<ABPair>(m, "ABPair")
        .def_readwrite("a", &ABPair::a)
        .def_readwrite("b", &ABPair::b);
    m.def("ab_by_integration", &ab_by_integration, py::arg("k"), py::arg("pot"),
          py::arg("max_step") = 1e-3,
          "Transition coefficients a(k), b(k) by direct RK4 integration of the "
          "scattering ODE (slow reference path).");

    py::class_<NormingL2>(m, "NormingL2")
        .def_readwrite("c2", &NormingL2::c2)
        .def_readwrite("c2_alt", &NormingL2::c2_alt)
        .def_readwrite("decay_mismatch", &NormingL2::decay_mismatch);
    m.def("norming_by_L2", &norming_by_L2, py::arg("kappa"), py::arg("pot"),
          py::arg("max_step") = 1e-3,
          "Norming constant from the L2 norm of the integrated bound-state "
          "eigenfunction (slow reference path).");
}
