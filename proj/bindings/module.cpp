#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "collatz/census.hpp"
#include "collatz/density.hpp"
#include "collatz/harness.hpp"
#include "collatz/trajectory.hpp"
#include "collatz/version.hpp"

namespace py = pybind11;

// Exactness across the boundary: Naturals travel as Python ints and
// Rationals as fractions.Fraction, both through decimal strings, so no
// value is ever rounded. Floats are rejected on purpose.
namespace pybind11::detail {

template <>
struct type_caster<mpz_class> {
 public:
  PYBIND11_TYPE_CASTER(mpz_class, const_name("int"));

  bool load(handle src, bool) {
    if (!PyLong_Check(src.ptr())) return false;
    object text = reinterpret_steal<object>(PyObject_Str(src.ptr()));
    if (!text) {
      PyErr_Clear();
      return false;
    }
    try {
      value = mpz_class(text.cast<std::string>(), 10);
    } catch (const std::invalid_argument&) {
      return false;
    }
    return true;
  }

  static handle cast(const mpz_class& src, return_value_policy, handle) {
    return PyLong_FromString(src.get_str().c_str(), nullptr, 10);
  }
};

template <>
struct type_caster<mpq_class> {
 public:
  PYBIND11_TYPE_CASTER(mpq_class, const_name("Fraction"));

  bool load(handle src, bool) {
    if (PyFloat_Check(src.ptr())) return false;
    if (PyLong_Check(src.ptr())) {
      object text = reinterpret_steal<object>(PyObject_Str(src.ptr()));
      if (!text) {
        PyErr_Clear();
        return false;
      }
      value = mpq_class(mpz_class(text.cast<std::string>(), 10));
      return true;
    }
    object obj = reinterpret_borrow<object>(src);
    if (!hasattr(obj, "numerator") || !hasattr(obj, "denominator")) return false;
    try {
      const std::string num = str(obj.attr("numerator")).cast<std::string>();
      const std::string den = str(obj.attr("denominator")).cast<std::string>();
      mpz_class d(den, 10);
      if (sgn(d) == 0) return false;
      value = mpq_class(mpz_class(num, 10), d);
      value.canonicalize();
    } catch (const std::invalid_argument&) {
      return false;
    }
    return true;
  }

  static handle cast(const mpq_class& src, return_value_policy, handle) {
    object fraction = module_::import("fractions").attr("Fraction");
    object num = reinterpret_steal<object>(
        PyLong_FromString(src.get_num().get_str().c_str(), nullptr, 10));
    object den = reinterpret_steal<object>(
        PyLong_FromString(src.get_den().get_str().c_str(), nullptr, 10));
    return fraction(num, den).release();
  }
};

}  // namespace pybind11::detail

namespace {

using namespace collatz;

ParityVariant variant_from(const std::string& name) {
  if (name == "exclusive") return ParityVariant::Exclusive;
  if (name == "inclusive") return ParityVariant::Inclusive;
  throw std::invalid_argument("variant must be 'exclusive' or 'inclusive'");
}

Comparator cmp_from(const std::string& name) {
  if (name == "strict") return Comparator::Strict;
  if (name == "weak") return Comparator::Weak;
  throw std::invalid_argument("cmp must be 'strict' or 'weak'");
}

py::dict audit_dict(const DropAuditReport& rep) {
  py::dict out;
  out["m"] = rep.m;
  out["d"] = rep.d;
  out["examined"] = rep.examined;
  out["audited"] = rep.audited;
  out["not_in_class"] = rep.not_in_class;
  out["rejected"] = rep.rejected;
  out["floor_violations"] = rep.floor_violations;
  out["chain_violations"] = rep.chain_violations;
  out["final_violations"] = rep.final_violations;
  out["witnesses"] = rep.witnesses;
  out["seed"] = rep.seed;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact integer experiments on the accelerated 3n+1 map";
  m.attr("__version__") = kVersion;

  py::class_<BoundFunction>(m, "Bound")
      .def(py::init<Rational, Rational>(), py::arg("a"), py::arg("b"),
           "The bound f(y) = a * y^b with positive rational a, b")
      .def_property_readonly("a", &BoundFunction::coefficient)
      .def_property_readonly("b", &BoundFunction::exponent)
      .def("value_below", &BoundFunction::value_below, py::arg("y"), py::arg("v"),
           "Exact test v < f(y)")
      .def("threshold_below", &BoundFunction::threshold_below, py::arg("y"),
           "Largest integer t with t < f(y)")
      .def("self_power", &BoundFunction::self_power, py::arg("k"))
      .def("__eq__",
           [](const BoundFunction& f, const BoundFunction& g) { return f == g; })
      .def("__repr__", &BoundFunction::str);

  m.def("compose", &compose, py::arg("f"), py::arg("g"),
        "Canonical f∘g; raises if the composed coefficient is irrational");

  m.def("step", &collatz_step, py::arg("n"));
  m.def("iterate", &iterate, py::arg("n"), py::arg("k"));
  m.def(
      "trajectory",
      [](const Natural& n, std::uint64_t cap) {
        const TrajectoryRecord rec = trajectory(n, cap);
        py::dict out;
        out["start"] = rec.start;
        out["iterates"] = rec.iterates;
        out["steps"] = rec.steps;
        out["terminated_by"] = rec.terminated_by == Termination::ReachedOne
                                   ? "reached-one"
                                   : "cap-hit";
        return out;
      },
      py::arg("n"), py::arg("cap") = 100000);
  m.def(
      "parity_vector",
      [](const Natural& y, std::size_t length) {
        std::vector<unsigned> bits;
        for (std::uint8_t b : parity_vector(y, length).bits) bits.push_back(b);
        return bits;
      },
      py::arg("y"), py::arg("length"));
  m.def(
      "parity_sum",
      [](const Natural& y, std::size_t mm, const std::string& variant) {
        return parity_sum(y, mm, variant_from(variant));
      },
      py::arg("y"), py::arg("m"), py::arg("variant") = "exclusive");
  m.def(
      "first_drop",
      [](const Natural& y, const BoundFunction& f, std::uint64_t cap,
         std::uint64_t min_k) { return first_drop(y, f, cap, min_k); },
      py::arg("y"), py::arg("f"), py::arg("cap") = 100000, py::arg("min_k") = 0);

  m.def(
      "census",
      [](unsigned mm, const Rational& d, const std::string& variant,
         const std::string& cmp, const Natural& base, unsigned threads) {
        CensusParams params;
        params.m = mm;
        params.d = d;
        params.variant = variant_from(variant);
        params.cmp = cmp_from(cmp);
        params.window_base = base;
        const CensusResult res = census(params, kCensusMaxM, threads);
        py::dict out;
        out["count"] = res.count;
        out["total"] = res.total;
        out["ratio"] = res.ratio;
        return out;
      },
      py::arg("m"), py::arg("d"), py::arg("variant") = "exclusive",
      py::arg("cmp") = "strict", py::arg("base") = Natural(0),
      py::arg("threads") = 1);
  m.def(
      "window_census",
      [](unsigned mm, const Rational& d, const std::string& variant,
         const std::string& cmp, const Natural& base, std::uint64_t length,
         unsigned threads) {
        return window_census(mm, d, variant_from(variant), cmp_from(cmp), base,
                             length, threads);
      },
      py::arg("m"), py::arg("d"), py::arg("variant"), py::arg("cmp"),
      py::arg("base"), py::arg("length"), py::arg("threads") = 1);
  m.def(
      "census_oracle",
      [](unsigned mm, const Rational& d, const std::string& variant,
         const std::string& cmp) {
        return binomial_census_oracle(mm, d, variant_from(variant), cmp_from(cmp));
      },
      py::arg("m"), py::arg("d"), py::arg("variant") = "exclusive",
      py::arg("cmp") = "strict");
  m.def(
      "residue_parity_table",
      [](unsigned k) {
        std::vector<std::vector<unsigned>> out;
        for (const auto& pv : residue_parity_table(k)) {
          std::vector<unsigned> bits;
          for (std::uint8_t b : pv.bits) bits.push_back(b);
          out.push_back(std::move(bits));
        }
        return out;
      },
      py::arg("k"));
  m.def(
      "parity_sum_below",
      [](const Natural& y, unsigned mm, const Rational& d,
         const std::string& variant) {
        return parity_sum_below(y, mm, d, variant_from(variant));
      },
      py::arg("y"), py::arg("m"), py::arg("d"), py::arg("variant") = "exclusive");
  m.def(
      "drop_density_threshold",
      [](unsigned M) {
        const DropThreshold t = drop_density_threshold(M);
        py::dict out;
        out["approx"] = t.approx;
        out["witness"] = t.witness;
        out["joint_with_lemma1"] = t.joint_with_lemma1;
        return out;
      },
      py::arg("M"));
  m.def("below_drop_threshold", &below_drop_threshold, py::arg("d"), py::arg("M"));
  m.def(
      "drop_guarantee_audit",
      [](unsigned mm, const Rational& d, const Natural& lo, const Natural& hi,
         std::uint64_t sample, std::uint64_t seed, const std::string& variant,
         unsigned threads) {
        AuditSample s;
        s.lo = lo;
        s.hi = hi;
        s.sample_count = sample;
        s.seed = seed;
        return audit_dict(drop_guarantee_audit(mm, d, s, variant_from(variant),
                                               threads));
      },
      py::arg("m"), py::arg("d"), py::arg("lo"), py::arg("hi"),
      py::arg("sample") = 0, py::arg("seed") = 0,
      py::arg("variant") = "exclusive", py::arg("threads") = 1);

  m.def(
      "h_image",
      [](const std::vector<Natural>& A, const BoundFunction& f, std::uint64_t cap,
         unsigned threads) {
        const HImageResult res = h_image(FiniteSet::from(A), f, cap, threads);
        py::dict out;
        out["image"] = res.image.elements();
        out["saturated"] = res.saturated_sources;
        return out;
      },
      py::arg("A"), py::arg("f"), py::arg("cap") = 100000, py::arg("threads") = 1);
  m.def(
      "drop_scan",
      [](const BoundFunction& f, const Natural& lo, const Natural& hi,
         std::uint64_t cap, std::uint64_t min_k, unsigned threads) {
        const DropScanReport rep = drop_scan(f, lo, hi, cap, min_k, threads);
        py::dict out;
        out["total"] = rep.total;
        out["excluded"] = rep.excluded;
        out["dropped"] = rep.dropped;
        out["unresolved"] = rep.unresolved;
        out["fraction"] = rep.fraction;
        return out;
      },
      py::arg("f"), py::arg("lo"), py::arg("hi"), py::arg("cap") = 100000,
      py::arg("min_k") = 0, py::arg("threads") = 1);
  m.def(
      "finite_density",
      [](const std::vector<Natural>& A, const Natural& N) {
        return finite_density(FiniteSet::from(A), N);
      },
      py::arg("A"), py::arg("N"));
  m.def(
      "density_profile",
      [](const std::vector<Natural>& A, std::vector<Natural> checkpoints) {
        const DensityProfile prof =
            density_profile(FiniteSet::from(A), std::move(checkpoints));
        py::dict out;
        out["checkpoints"] = prof.checkpoints;
        out["ratios"] = prof.ratios;
        out["burn_in_index"] = prof.burn_in_index;
        out["tail_sup"] = prof.tail_sup;
        out["tail_inf"] = prof.tail_inf;
        return out;
      },
      py::arg("A"), py::arg("checkpoints"));
  m.def(
      "image_cardinality_check",
      [](const std::vector<Natural>& B, unsigned mm) {
        const CardinalityCheck chk = image_cardinality_check(FiniteSet::from(B), mm);
        py::dict out;
        out["holds"] = chk.holds;
        out["source_size"] = chk.source_size;
        out["image_size"] = chk.image_size;
        return out;
      },
      py::arg("B"), py::arg("m"));
  m.def(
      "image_inclusion_check",
      [](const std::vector<Natural>& A, const BoundFunction& f,
         const BoundFunction& g, unsigned k, std::uint64_t cap, unsigned threads) {
        const InclusionReport rep =
            image_inclusion_check(FiniteSet::from(A), f, g, k, cap, threads);
        py::dict out;
        out["comparison_holds"] = rep.comparison_holds;
        out["composition_holds"] = rep.composition_holds;
        out["power_holds"] = rep.power_holds;
        out["power_k"] = rep.power_k;
        out["saturated"] = rep.saturated;
        out["verdict_valid"] = rep.verdict_valid;
        return out;
      },
      py::arg("A"), py::arg("f"), py::arg("g"), py::arg("k") = 2,
      py::arg("cap") = 100000, py::arg("threads") = 1);

  m.def(
      "run",
      [](const std::string& subcommand,
         const std::map<std::string, std::string>& params) {
        ExperimentConfig config;
        config.subcommand = subcommand;
        config.params = params;
        const RunRecord rec = run(config);
        py::dict out;
        out["payload"] = rec.payload;
        out["seed"] = rec.seed;
        out["version"] = rec.version;
        return out;
      },
      py::arg("subcommand"), py::arg("params") = std::map<std::string, std::string>{},
      "Run one harness experiment and return its payload");

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
