#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "assemblies/bounds.hpp"
#include "assemblies/exact.hpp"
#include "assemblies/samplers.hpp"
#include "assemblies/spec.hpp"
#include "assemblies/tilted.hpp"

namespace py = pybind11;
using namespace assemblies;

namespace {

py::object big_to_py(const BigInt& v) {
  // arbitrary precision survives the trip through the decimal string
  return py::module_::import("builtins").attr("int")(v.get_str());
}

py::object rat_to_py(const BigRat& q) {
  auto frac = py::module_::import("fractions").attr("Fraction");
  return frac(big_to_py(q.get_num()), big_to_py(q.get_den()));
}

py::list copart_to_py(const Copartition& c) {
  py::list out;
  for (auto p : c.parts) out.append(p);
  return out;
}

py::dict law_to_py(const ExactLaw& law) {
  py::dict d;
  d["n"] = law.n;
  d["k"] = law.k;
  d["r"] = law.r;
  d["has_support"] = law.has_support;
  py::list support, prob;
  for (std::size_t i = 0; i < law.support.size(); ++i) {
    support.append(copart_to_py(law.support[i]));
    if (law.mode == NumericMode::exact) prob.append(rat_to_py(law.prob[i]));
    else prob.append(std::exp(law.log_prob[i]));
  }
  d["support"] = support;
  d["prob"] = prob;
  d["l1_pmf"] = law.l1_pmf;
  d["parts_pmf"] = law.parts_pmf;
  return d;
}

py::dict json_to_py(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

}  // namespace

PYBIND11_MODULE(assemblies_lab, m) {
  m.doc() = "exact counting, sampling and effective bounds for labelled assemblies";

  py::register_exception<divergence_error>(m, "DivergenceError");
  py::register_exception<unsupported_error>(m, "UnsupportedError");
  py::register_exception<no_solution_error>(m, "NoSolutionError");

  py::class_<AssemblySpec>(m, "AssemblySpec")
      .def_static("builtin", &AssemblySpec::builtin, py::arg("id"))
      .def_static("from_json_file", &AssemblySpec::from_json_file, py::arg("path"))
      .def_static("from_json_text", &AssemblySpec::from_json_text, py::arg("text"))
      .def_static(
          "custom",
          [](const std::string& name, const std::vector<long>& m_values, bool radius_positive) {
            std::vector<BigInt> mv(m_values.begin(), m_values.end());
            return AssemblySpec::custom(name, mv, radius_positive);
          },
          py::arg("name"), py::arg("m"), py::arg("radius_positive") = true)
      .def_property_readonly("name", &AssemblySpec::name)
      .def("m", [](const AssemblySpec& s, std::size_t i) { return big_to_py(s.m(i)); },
           py::arg("i"))
      .def("rho", &AssemblySpec::rho, py::arg("probe_limit") = 64);

  m.def("count_p",
        [](const AssemblySpec& s, std::size_t n) { return big_to_py(count_p(s, n)); },
        py::arg("spec"), py::arg("n"));
  m.def("count_pnk",
        [](const AssemblySpec& s, std::size_t n, std::size_t k) {
          return big_to_py(count_pnk(s, n, k));
        },
        py::arg("spec"), py::arg("n"), py::arg("k"));
  m.def("count_type",
        [](const AssemblySpec& s, const std::vector<std::uint64_t>& counts) {
          return big_to_py(count_N(s, PartitionType::from_counts(counts)));
        },
        py::arg("spec"), py::arg("counts"),
        "number of structures whose component type is counts[i-1] parts of size i");

  m.def("component_law",
        [](const AssemblySpec& s, std::size_t n, std::size_t k) {
          return law_to_py(exact_component_law(s, n, k));
        },
        py::arg("spec"), py::arg("n"), py::arg("k"));
  m.def("low_rank_law",
        [](const AssemblySpec& s, std::size_t n, std::uint64_t r, const std::string& mode) {
          auto nm = mode == "log" ? NumericMode::log_space : NumericMode::exact;
          return law_to_py(low_rank_law(s, n, r, nm));
        },
        py::arg("spec"), py::arg("n"), py::arg("r"), py::arg("mode") = "exact");

  m.def("lambda_i", &lambda_i, py::arg("spec"), py::arg("x"), py::arg("i"));
  m.def("egf_M",
        [](const AssemblySpec& s, double x) {
          auto e = egf_M(s, x);
          py::dict d;
          d["value"] = e.value;
          d["truncation_index"] = e.truncation_index;
          d["tail_bound"] = e.tail_bound;
          return d;
        },
        py::arg("spec"), py::arg("x"));
  m.def("solve_x_T", &solve_x_T, py::arg("spec"), py::arg("n"));
  m.def("solve_x_p1",
        [](const AssemblySpec& s, std::size_t n, std::size_t k, const std::string& policy) {
          return solve_x_p1(s, n, k, policy == "root" ? XPolicy::p1_root : XPolicy::ratio);
        },
        py::arg("spec"), py::arg("n"), py::arg("k"), py::arg("policy") = "ratio");
  m.def("solve_theta_x",
        [](const AssemblySpec& s, std::size_t n, std::size_t k) {
          auto tx = solve_theta_x(s, n, k);
          return py::make_tuple(tx.theta, tx.x);
        },
        py::arg("spec"), py::arg("n"), py::arg("k"));
  m.def("identity_check_pn", &identity_check_pn, py::arg("spec"), py::arg("x"), py::arg("n"));
  m.def("identity_check_pnk",
        [](const AssemblySpec& s, double x, std::size_t n, std::size_t k) {
          return identity_check_pnk(s, x, n, k, YSupport::finite);
        },
        py::arg("spec"), py::arg("x"), py::arg("n"), py::arg("k"));

  m.def("sample_components",
        [](const AssemblySpec& s, std::size_t n, std::size_t k, std::uint64_t seed,
           std::uint64_t samples) {
          SamplerConfig cfg;
          cfg.spec = &s;
          cfg.n = n;
          cfg.k = k;
          cfg.seed = seed;
          cfg.x = solve_x_p1(s, n, k, XPolicy::ratio);
          YSampler ys(s, cfg.x, YSupport::finite, n);
          py::list out;
          for (std::uint64_t i = 0; i < samples; ++i) {
            Rng rng = Rng::worker_stream(seed, i);
            auto rep = sample_exact_dnk(cfg, ys, rng);
            if (!rep.accepted) throw std::runtime_error("trial budget exceeded");
            out.append(copart_to_py(rep.copart));
          }
          return out;
        },
        py::arg("spec"), py::arg("n"), py::arg("k"), py::arg("seed") = 0,
        py::arg("samples") = 1,
        "exact draws from the component law, returned as copartitions of n - k");

  m.def("lambda_limit", &lambda_limit, py::arg("spec"), py::arg("t"));
  m.def("lambda_limit_ell", &lambda_limit_ell, py::arg("spec"), py::arg("t"), py::arg("ell"));
  m.def("asymptotic_log_pnk", &asymptotic_log_pnk, py::arg("spec"), py::arg("n"), py::arg("r"));
  m.def("bounds_report",
        [](const AssemblySpec& s, std::size_t n, std::uint64_t r) {
          BoundsReport rep;
          rep.assembly = s.name();
          rep.n = n;
          rep.k = n - r;
          rep.r = r;
          auto l23 = lemma23_bound(s, n, r);
          rep.y = l23.y;
          rep.l1_eq3_bound = l23.bound;
          auto l24 = lemma24_bound(s, n, r);
          rep.x = l24.x;
          rep.rho = l24.rho;
          rep.hyp_24 = l24.hyp_24;
          rep.hyp_needed = l24.hyp_needed;
          rep.u4 = l24.u4;
          rep.xsum_lower = l24.xsum_lower;
          auto sw = thm15_sandwich(s, n, r);
          if (std::isfinite(sw.z)) rep.z = sw.z;
          rep.log_pnk_lower = sw.log_lower;
          rep.log_pnk_upper = sw.log_upper;
          return json_to_py(rep.to_json());
        },
        py::arg("spec"), py::arg("n"), py::arg("r"));
  m.def("sd_report",
        [](const AssemblySpec& s, std::size_t n, std::size_t k, std::uint64_t mm) {
          return json_to_py(sd_bounds(s, n, k, mm).to_json());
        },
        py::arg("spec"), py::arg("n"), py::arg("k"), py::arg("m") = 0);
  m.def("classify_regime",
        [](const AssemblySpec& s, std::size_t n, std::uint64_t r) {
          auto d = thm2_classify(s, n, r);
          py::dict out;
          out["alpha_hat"] = d.alpha_hat;
          out["ell"] = d.ell;
          out["boundary"] = d.boundary;
          out["t"] = d.t;
          if (d.lambda) out["lambda"] = *d.lambda;
          else out["lambda"] = py::none();
          out["l1_support"] = d.l1_support;
          out["di_magnitude"] = d.di_magnitude;
          out["note"] = d.note;
          return out;
        },
        py::arg("spec"), py::arg("n"), py::arg("r"));

  py::class_<LargestPartTable>(m, "LargestPartTable")
      .def(py::init<std::uint64_t>(), py::arg("r"))
      .def_property_readonly("r", &LargestPartTable::r)
      .def_property_readonly("total",
                             [](const LargestPartTable& t) { return big_to_py(t.total()); })
      .def("prob_eq",
           [](const LargestPartTable& t, std::uint64_t j) { return rat_to_py(t.prob_eq(j)); },
           py::arg("j"))
      .def("mean", &LargestPartTable::mean)
      .def("quantile", &LargestPartTable::quantile, py::arg("q"));
}
