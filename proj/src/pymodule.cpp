#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fullerlab/analysis.hpp"
#include "fullerlab/jsonio.hpp"
#include "fullerlab/problems.hpp"
#include "fullerlab/simulate.hpp"

#include <cmath>
#include <optional>

namespace py = pybind11;
using namespace fullerlab;

namespace {

py::object json_to_py(const Json& j) {
    switch (j.type()) {
        case Json::value_t::null:
            return py::none();
        case Json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case Json::value_t::number_integer:
            return py::int_(j.get<long long>());
        case Json::value_t::number_unsigned:
            return py::int_(j.get<unsigned long long>());
        case Json::value_t::number_float:
            return py::float_(j.get<double>());
        case Json::value_t::string:
            return py::str(j.get<std::string>());
        case Json::value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(json_to_py(item));
            return out;
        }
        case Json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it)
                out[py::str(it.key())] = json_to_py(it.value());
            return out;
        }
        default:
            return py::none();
    }
}

QMatrix matrix_from_py(const py::object& obj) {
    std::vector<std::vector<Rational>> rows;
    for (const auto& row : obj) {
        std::vector<Rational> r;
        for (const auto& entry : row.cast<py::iterable>()) {
            if (py::isinstance<py::str>(entry))
                r.push_back(Rational::from_string(entry.cast<std::string>()));
            else
                r.push_back(Rational(entry.cast<long>()));
        }
        rows.push_back(std::move(r));
    }
    return QMatrix::from_rows(rows);
}

struct Problem {
    AffineSystem sys;
};

SimOptions options_from_kwargs(double tol_event, double zeno_floor, double target_ball,
                               double rel_tol, double abs_tol, double h_max,
                               double graze_slope) {
    SimOptions opts;
    opts.tol_event = tol_event;
    opts.zeno_floor = zeno_floor;
    opts.target_ball = target_ball;
    opts.rel_tol = rel_tol;
    opts.abs_tol = abs_tol;
    opts.h_max = h_max;
    opts.graze_slope = graze_slope;
    return opts;
}

py::dict trajectory_to_py(const Trajectory& traj, bool include_samples) {
    py::dict out;
    py::list events;
    for (const auto& e : traj.events) {
        py::dict ev;
        ev["t"] = e.t;
        ev["input"] = e.input_index;
        ev["direction"] = e.direction;
        ev["slope"] = e.phi_slope;
        events.append(ev);
    }
    out["events"] = events;
    out["terminated_by"] = to_string(traj.terminated_by);
    out["final_time"] = traj.final_time;
    out["grazing"] = traj.grazing_count;
    out["sample_count"] = traj.samples.size();
    out["max_abs_hamiltonian"] = traj.max_abs_hamiltonian;
    if (!traj.error_message.empty()) out["error"] = traj.error_message;
    out["chatter"] = json_to_py(chatter_to_json(fit_chatter(traj)));
    if (include_samples) {
        py::list samples;
        for (const auto& s : traj.samples) {
            py::dict ps;
            ps["t"] = s.t;
            ps["z"] = s.z;
            ps["p"] = s.p;
            ps["u"] = s.u;
            samples.append(ps);
        }
        out["samples"] = samples;
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Singular-arc and chattering analysis for affine optimal-control systems";

    py::class_<Problem>(m, "Problem")
        .def_property_readonly("name", [](const Problem& p) { return p.sys.name; })
        .def_property_readonly("n", [](const Problem& p) { return p.sys.n; })
        .def_property_readonly("m", [](const Problem& p) { return p.sys.m; })
        .def("to_json", [](const Problem& p) { return problem_to_json(p.sys).dump(2); })
        .def("__repr__", [](const Problem& p) {
            return "<Problem " + (p.sys.name.empty() ? std::string("custom") : p.sys.name) + " n=" +
                   std::to_string(p.sys.n) + " m=" + std::to_string(p.sys.m) + ">";
        });

    m.def("fuller_classic", [] { return Problem{fuller_classic()}; });
    m.def("time_optimal_di", [] { return Problem{time_optimal_di()}; });
    m.def(
        "fuller_multi",
        [](const py::object& m1, const py::object& m2) {
            return Problem{fuller_multi(matrix_from_py(m1), matrix_from_py(m2))};
        },
        py::arg("m1"), py::arg("m2"),
        "Entries are integers or rational strings like '1/2'.");
    m.def(
        "hamiltonian_family",
        [](const py::object& t, const py::object& mm, const std::string& q, const std::string& c) {
            QMatrix tq = matrix_from_py(t);
            return Problem{hamiltonian_family(tq, matrix_from_py(mm),
                                              Poly::from_text(q, tq.rows), Poly::from_text(c, tq.rows))};
        },
        py::arg("t"), py::arg("m"), py::arg("q"), py::arg("c"),
        "Q and c are polynomial text over x0..x{n-1}.");
    m.def("problem_from_json", [](const std::string& text) {
        return Problem{problem_from_json(Json::parse(text))};
    });

    m.def(
        "analyze",
        [](const Problem& p, uint64_t seed, std::optional<std::vector<double>> point,
           double tau_rank, double tau_eig, int max_depth) {
            AnalyzeOptions opts;
            opts.seed = seed;
            if (point) opts.point = *point;
            opts.tau_rank = tau_rank;
            opts.tau_eig = tau_eig;
            opts.max_depth = max_depth;
            return json_to_py(analysis_report(p.sys, opts));
        },
        py::arg("problem"), py::arg("seed") = 0, py::arg("point") = py::none(),
        py::arg("tau_rank") = 1e-9, py::arg("tau_eig") = 1e-9, py::arg("max_depth") = 12,
        "Ladder, Legendre-Clebsch test, cone ranks and the chattering certificate.");

    m.def(
        "simulate_feedback",
        [](const Problem& p, const std::vector<double>& x0, std::optional<double> beta,
           std::optional<std::vector<std::string>> laws, double horizon, double tol_event,
           double zeno_floor, double target_ball, double rel_tol, double abs_tol, double h_max,
           double graze_slope, bool include_samples) {
            FeedbackLaw law;
            if (laws) {
                std::vector<Poly> surfaces;
                for (const auto& s : *laws) surfaces.push_back(Poly::from_text(s, p.sys.n));
                law = FeedbackLaw::polynomial(std::move(surfaces));
            } else if (beta) {
                law = FeedbackLaw::fuller_curve(*beta);
            } else {
                throw std::invalid_argument("simulate_feedback needs beta or laws");
            }
            SimOptions opts = options_from_kwargs(tol_event, zeno_floor, target_ball, rel_tol,
                                                  abs_tol, h_max, graze_slope);
            Trajectory traj = simulate_feedback(p.sys, law, x0, horizon, opts);
            return trajectory_to_py(traj, include_samples);
        },
        py::arg("problem"), py::arg("x0"), py::arg("beta") = py::none(),
        py::arg("laws") = py::none(), py::arg("horizon") = 10.0, py::arg("tol_event") = 1e-13,
        py::arg("zeno_floor") = 1e-10, py::arg("target_ball") = 0.0, py::arg("rel_tol") = 1e-10,
        py::arg("abs_tol") = 1e-12, py::arg("h_max") = 0.05, py::arg("graze_slope") = 1e-12,
        py::arg("include_samples") = false,
        "Closed-loop bang-bang run with event localization and chatter fit.");

    m.def(
        "simulate_extremal",
        [](const Problem& p, const std::vector<double>& z0, const std::vector<double>& p0,
           double lam, double horizon, double tol_event, double zeno_floor, double rel_tol,
           double abs_tol, double h_max, double graze_slope, bool include_samples) {
            AugmentedSystem aug = augment(p.sys);
            SimOptions opts = options_from_kwargs(tol_event, zeno_floor, 0.0, rel_tol, abs_tol,
                                                  h_max, graze_slope);
            Trajectory traj = integrate_extremal(aug, z0, p0, lam, horizon, opts);
            return trajectory_to_py(traj, include_samples);
        },
        py::arg("problem"), py::arg("z0"), py::arg("p0"), py::arg("lam") = 1.0,
        py::arg("horizon") = 5.0, py::arg("tol_event") = 1e-13, py::arg("zeno_floor") = 1e-10,
        py::arg("rel_tol") = 1e-10, py::arg("abs_tol") = 1e-12, py::arg("h_max") = 0.05,
        py::arg("graze_slope") = 1e-12, py::arg("include_samples") = false,
        "Integrates the state-adjoint system with sign feedback; z0 is the "
        "augmented state (cost first), p0 the n-dimensional adjoint.");

    m.def(
        "parity_oracle",
        [](int q, std::optional<int> r, bool a_identically_zero,
           std::optional<std::vector<double>> a_value, std::vector<std::vector<double>> b,
           double k) {
            AValueInfo info;
            info.identically_zero = a_identically_zero;
            if (a_value) {
                Eigen::VectorXd av(static_cast<long>(a_value->size()));
                for (size_t i = 0; i < a_value->size(); ++i) av(static_cast<long>(i)) = (*a_value)[i];
                info.value_at_tc = av;
            }
            Eigen::MatrixXd bm(static_cast<long>(b.size()),
                               b.empty() ? 0 : static_cast<long>(b.front().size()));
            for (size_t i = 0; i < b.size(); ++i)
                for (size_t j = 0; j < b[i].size(); ++j)
                    bm(static_cast<long>(i), static_cast<long>(j)) = b[i][j];
            return json_to_py(junction_verdict_to_json(parity_oracle(q, r, info, bm, k)));
        },
        py::arg("q"), py::arg("r") = py::none(), py::arg("a_identically_zero") = false,
        py::arg("a_value") = py::none(), py::arg("b") = std::vector<std::vector<double>>{},
        py::arg("k") = 1.0, "Junction order-parity analysis and corollary flags.");

    m.def("poly_roundtrip", [](const std::string& text, int nvars) {
        return Poly::from_text(text, nvars).to_text();
    });

    m.attr("__version__") = "0.1.0";
}
