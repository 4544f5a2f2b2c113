// Python bindings for the main operations: exact geometry and flow maps,
// field evaluation, density transport, mollified fields, ensembles, and the
// path-measure estimators.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "depauw/density.hpp"
#include "depauw/exact_flow.hpp"
#include "depauw/mollify.hpp"
#include "depauw/path_measures.hpp"
#include "depauw/tracer.hpp"

namespace py = pybind11;
using namespace depauw;

namespace {

py::array_t<double> grid_to_array(const GridDensity& d)
{
    int64_t w = d.width();
    py::array_t<double> a({w, w});
    auto r = a.mutable_unchecked<2>();
    for (int64_t iy = 0; iy < w; ++iy)
        for (int64_t ix = 0; ix < w; ++ix) r(iy, ix) = d.at(ix, iy);
    return a;
}

Dyadic dyadic_from_object(const py::object& o)
{
    if (py::isinstance<Dyadic>(o)) return o.cast<Dyadic>();
    if (py::isinstance<py::str>(o)) {
        auto d = Dyadic::parse(o.cast<std::string>());
        if (!d) throw py::value_error("not an exact dyadic rational: " + o.cast<std::string>());
        return *d;
    }
    return Dyadic::from_double(o.cast<double>());
}

}  // namespace

PYBIND11_MODULE(_depauw, m)
{
    m.doc() = "Depauw field simulator: exact dyadic flows, checkerboard transport, "
              "divergence-free mollification, and path-measure estimators";

    py::class_<Dyadic>(m, "Dyadic")
        .def(py::init([](const py::object& o) { return dyadic_from_object(o); }))
        .def_static("parse",
                    [](const std::string& s) {
                        auto d = Dyadic::parse(s);
                        if (!d) throw py::value_error("not an exact dyadic rational: " + s);
                        return *d;
                    })
        .def("__float__", &Dyadic::to_double)
        .def("__str__", &Dyadic::to_decimal_string)
        .def("__repr__", [](const Dyadic& d) { return "Dyadic(\"" + d.to_pow2_string() + "\")"; })
        .def("pow2_string", &Dyadic::to_pow2_string)
        .def("decimal_string", &Dyadic::to_decimal_string)
        .def(
            "__eq__", [](const Dyadic& a, const Dyadic& b) { return a == b; }, py::is_operator())
        .def("__add__", [](const Dyadic& a, const Dyadic& b) { return a + b; })
        .def("__sub__", [](const Dyadic& a, const Dyadic& b) { return a - b; })
        .def("__mul__", [](const Dyadic& a, const Dyadic& b) { return a * b; });

    py::class_<TorusPoint>(m, "TorusPoint")
        .def(py::init([](const py::object& x, const py::object& y) {
                 return TorusPoint(dyadic_from_object(x), dyadic_from_object(y));
             }),
             py::arg("x"), py::arg("y"))
        .def_property_readonly("x", [](const TorusPoint& p) { return p.x; })
        .def_property_readonly("y", [](const TorusPoint& p) { return p.y; })
        .def("__repr__",
             [](const TorusPoint& p) {
                 return "TorusPoint(" + p.x.to_pow2_string() + ", " + p.y.to_pow2_string() + ")";
             })
        .def("__eq__", [](const TorusPoint& a, const TorusPoint& b) { return a == b; },
             py::is_operator())
        .def("to_floats", [](const TorusPoint& p) {
            return py::make_tuple(p.x.to_double(), p.y.to_double());
        });

    py::class_<Cell>(m, "Cell")
        .def(py::init<int, int64_t, int64_t>(), py::arg("level"), py::arg("ix"), py::arg("iy"))
        .def_readwrite("level", &Cell::level)
        .def_readwrite("ix", &Cell::ix)
        .def_readwrite("iy", &Cell::iy)
        .def("__eq__", [](const Cell& a, const Cell& b) { return a == b; }, py::is_operator())
        .def("__repr__", [](const Cell& c) {
            return "Cell(" + std::to_string(c.level) + ", " + std::to_string(c.ix) + ", " +
                   std::to_string(c.iy) + ")";
        });

    m.def("cell_of", &cell_of, py::arg("p"), py::arg("level"));
    m.def("checkerboard_value", &checkerboard_value);
    m.def("cell_center", &cell_center);
    m.def("torus_distance",
          [](const TorusPoint& a, const TorusPoint& b) { return torus_distance(a, b); });

    m.def("eval_w", [](double x, double y) {
        Vec2 v = eval_w({x, y});
        return py::make_tuple(v.x, v.y);
    });
    m.def("eval_u", [](double x, double y) {
        Vec2 v = eval_u({x, y});
        return py::make_tuple(v.x, v.y);
    });
    m.def("eval_b", [](double t, double x, double y) {
        Vec2 v = eval_b(t, Vec2{x, y});
        return py::make_tuple(v.x, v.y);
    });
    m.def("eval_b_truncated", [](double tau, double t, double x, double y) {
        Vec2 v = eval_b_truncated(tau, t, {x, y});
        return py::make_tuple(v.x, v.y);
    });
    m.def("eval_stream",
          [](int stage, double x, double y) { return eval_stream(StageIndex{stage}, Vec2{x, y}); });

    m.def(
        "stage_flow_exact",
        [](const TorusPoint& p, int stage, const py::object& dt, bool backward) {
            return stage_flow_exact(p, StageIndex{stage}, dyadic_from_object(dt),
                                    backward ? FlowDirection::backward : FlowDirection::forward);
        },
        py::arg("p"), py::arg("stage"), py::arg("dt"), py::arg("backward") = false);
    m.def(
        "quarter_turn_cells",
        [](const Cell& c, bool backward) {
            return quarter_turn_cells(c,
                                      backward ? FlowDirection::backward : FlowDirection::forward);
        },
        py::arg("cell"), py::arg("backward") = false);
    m.def(
        "flow",
        [](const TorusPoint& p, const py::object& t_start, const py::object& t_end, int depth) {
            FlowResult r =
                flow(p, FlowQuery{dyadic_from_object(t_start), dyadic_from_object(t_end), depth});
            py::list samples;
            for (const auto& [t, q] : r.samples) samples.append(py::make_tuple(t, q));
            return py::make_tuple(r.end, samples);
        },
        py::arg("p"), py::arg("t_start"), py::arg("t_end"), py::arg("max_stage_depth") = 40);

    m.def("evolve_rho_B", [](int depth) {
        DensityTrajectory traj = evolve_rho_B(depth);
        py::list out;
        for (const auto& [t, d] : traj.checkpoints)
            out.append(py::make_tuple(t.to_double(), grid_to_array(d)));
        return out;
    });
    m.def("check_properties", [](int depth) {
        PropertyReport rep = check_properties(evolve_rho_B(depth), evolve_rho_W(depth));
        py::dict d;
        d["sum_identity"] = rep.sum_identity;
        d["support_union"] = rep.support_union;
        d["support_disjoint"] = rep.support_disjoint;
        d["halves_average"] = rep.halves_average;
        d["pass"] = rep.all_pass();
        d["failures"] = rep.failures;
        return d;
    });

    py::class_<MollifiedField>(m, "MollifiedField")
        .def_static("build", &MollifiedField::build, py::arg("eps"), py::arg("h") = 0.0,
                    py::arg("workers") = 0, py::arg("cache_dir") = std::string(),
                    py::arg("max_depth") = -1)
        .def_readonly("eps", &MollifiedField::eps)
        .def_readonly("depth", &MollifiedField::depth)
        .def("floor_time", &MollifiedField::floor_time)
        .def("velocity", [](const MollifiedField& f, double t, double x, double y) {
            Vec2 v = f.velocity(t, {x, y});
            return py::make_tuple(v.x, v.y);
        });

    py::class_<PathEnsemble>(m, "PathEnsemble")
        .def_property_readonly("n_paths", [](const PathEnsemble& e) { return e.paths.size(); })
        .def_property_readonly("seed", [](const PathEnsemble& e) { return e.meta.seed; })
        .def_property_readonly("t_end", [](const PathEnsemble& e) { return e.meta.t_end; })
        .def_property_readonly("time0_error_bound",
                               [](const PathEnsemble& e) { return e.meta.time0_error_bound; })
        .def("path_times",
             [](const PathEnsemble& e, size_t i) {
                 const auto& t = e.paths.at(i).times;
                 return py::array_t<double>(static_cast<py::ssize_t>(t.size()), t.data());
             })
        .def("path_points", [](const PathEnsemble& e, size_t i) {
            const auto& p = e.paths.at(i);
            py::array_t<double> a({static_cast<py::ssize_t>(p.size()), py::ssize_t(2)});
            auto r = a.mutable_unchecked<2>();
            for (size_t j = 0; j < p.size(); ++j) {
                r(static_cast<py::ssize_t>(j), 0) = p.points[j].x;
                r(static_cast<py::ssize_t>(j), 1) = p.points[j].y;
            }
            return a;
        });

    m.def(
        "backward_ensemble",
        [](uint64_t n, int depth, uint64_t seed, const MollifiedField* field, double step,
           int workers) {
            FieldRef ref = field ? FieldRef::mollified(*field) : FieldRef::exact_field();
            return backward_ensemble(n, depth, ref, seed, StartDistribution::uniform(), step,
                                     workers);
        },
        py::arg("n"), py::arg("depth"), py::arg("seed"), py::arg("field") = nullptr,
        py::arg("step") = 0.0, py::arg("workers") = 0, py::keep_alive<0, 4>());

    m.def("lipschitz_audit", [](const PathEnsemble& e) {
        LipschitzReport r = lipschitz_audit(e);
        py::dict d;
        d["max_ratio"] = r.max_ratio;
        d["bound"] = r.bound;
        d["pass"] = r.pass;
        return d;
    });

    m.def(
        "marginal",
        [](const PathEnsemble& e, double t, int level) {
            CellHistogram h = marginal(e, t, level);
            int64_t w = h.width();
            py::array_t<double> a({w, w});
            auto r = a.mutable_unchecked<2>();
            for (int64_t iy = 0; iy < w; ++iy)
                for (int64_t ix = 0; ix < w; ++ix) r(iy, ix) = h.at(ix, iy);
            return a;
        },
        py::arg("ensemble"), py::arg("t"), py::arg("level"));

    m.def("apply_stop", &apply_stop, py::arg("ensemble"), py::arg("tau"));
    m.def(
        "bl_distance",
        [](const PathEnsemble& a, const PathEnsemble& b) {
            double t_min = std::max(a.meta.t_end, b.meta.t_end);
            return bl_distance(a, b, standard_bl_bank(t_min)).value;
        },
        py::arg("e1"), py::arg("e2"));

    m.def(
        "stochasticity",
        [](const PathEnsemble& e, int start_level, int target_level) {
            ConditionalHistogram cond =
                disintegrate(endpoint_joint(e, start_level, target_level));
            StochasticityReport r =
                stochasticity_report(cond, checkerboard_mask(target_level), 0.6, 0.05);
            py::dict d;
            d["rows"] = r.rows.size();
            d["frac_max_atom_le"] = r.frac_max_atom_le;
            d["frac_black_within"] = r.frac_black_within;
            d["max_atom_q50"] = r.max_atom_q50;
            d["black_q50"] = r.black_q50;
            return d;
        },
        py::arg("ensemble"), py::arg("start_level"), py::arg("target_level") = 0);
}
