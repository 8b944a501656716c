#ifndef SOLGEO_IO_HPP
#define SOLGEO_IO_HPP

// JSON forms of kernel/measure specs and reports; CSV writers.
// Requires nlohmann/json.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "solgeo/harmonic.hpp"
#include "solgeo/sde.hpp"
#include "solgeo/stats.hpp"

namespace solgeo {

using Json = nlohmann::ordered_json;

/// Malformed configuration; the message starts with the offending field path.
class SchemaError : public std::invalid_argument {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : std::invalid_argument(path + ": " + what), path_(path) {}
  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  std::string path_;
};

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

}  // namespace detail

/// Typed accessors that report the field path on failure.
class JsonReader {
 public:
  JsonReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key) && !j_[key].is_null(); }
  [[nodiscard]] std::string path(const std::string& key) const { return detail::join_path(path_, key); }

  [[nodiscard]] double number(const std::string& key) const {
    if (!has(key)) throw SchemaError(path(key), "missing required field");
    const auto& v = j_[key];
    if (!v.is_number()) throw SchemaError(path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(path(key), "expected a finite number");
    return d;
  }
  [[nodiscard]] double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  [[nodiscard]] double positive(const std::string& key) const {
    const double d = number(key);
    if (!(d > 0.0)) throw SchemaError(path(key), "must be positive");
    return d;
  }
  [[nodiscard]] double positive(const std::string& key, double fallback) const {
    return has(key) ? positive(key) : fallback;
  }
  [[nodiscard]] std::uint64_t count(const std::string& key) const {
    if (!has(key)) throw SchemaError(path(key), "missing required field");
    const auto& v = j_[key];
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
      throw SchemaError(path(key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }
  [[nodiscard]] std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? count(key) : fallback;
  }
  [[nodiscard]] std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!j_[key].is_string()) throw SchemaError(path(key), "expected a string");
    return j_[key].get<std::string>();
  }
  [[nodiscard]] bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_[key].is_boolean()) throw SchemaError(path(key), "expected true or false");
    return j_[key].get<bool>();
  }
  [[nodiscard]] JsonReader object(const std::string& key) const {
    if (!has(key)) throw SchemaError(path(key), "missing required field");
    return {j_[key], path(key)};
  }
  [[nodiscard]] const Json& raw(const std::string& key) const { return j_[key]; }
  [[nodiscard]] const Json& json() const { return j_; }

  /// Rejects keys outside `allowed` (catches typos such as "dT").
  void only(std::initializer_list<const char*> allowed) const {
    for (const auto& [k, _] : j_.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) throw SchemaError(path(k), "unknown field");
    }
  }

 private:
  const Json& j_;
  std::string path_;
};

// ---------------------------------------------------------------------------
// Kernel and measure specs: {plane, curvature, drift, lambda, atoms:[{xi|"omega", w}]}

struct PlaneMeasure {
  KernelSpec kernel;  // xi unused
  MeasureSpec measure;
};

inline Json to_json(const PlaneMeasure& pm) {
  Json atoms = Json::array();
  for (const auto& at : pm.measure.atoms) {
    Json a;
    if (at.xi) a["xi"] = *at.xi;
    else a["xi"] = "omega";
    a["w"] = at.w;
    atoms.push_back(a);
  }
  return Json{{"plane", to_string(pm.kernel.plane)},
              {"curvature", pm.kernel.curvature},
              {"drift", pm.kernel.drift},
              {"lambda", pm.kernel.lambda},
              {"atoms", atoms}};
}

inline PlaneMeasure plane_measure_from_json(const Json& j, const std::string& path) {
  const JsonReader r(j, path);
  r.only({"plane", "curvature", "drift", "lambda", "atoms"});
  PlaneMeasure pm;
  const std::string plane = r.string("plane", "");
  if (plane == "first") pm.kernel.plane = Plane::first;
  else if (plane == "second") pm.kernel.plane = Plane::second;
  else throw SchemaError(r.path("plane"), "expected \"first\" or \"second\"");
  pm.kernel.curvature = r.positive("curvature");
  pm.kernel.drift = r.number("drift");
  pm.kernel.lambda = r.number("lambda");
  if (!r.has("atoms") || !r.raw("atoms").is_array()) throw SchemaError(r.path("atoms"), "expected an array");
  const auto& atoms = r.raw("atoms");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string ap = r.path("atoms") + "[" + std::to_string(i) + "]";
    const JsonReader ar(atoms[i], ap);
    ar.only({"xi", "w"});
    MeasureSpec::Atom at;
    if (!ar.has("xi")) throw SchemaError(ar.path("xi"), "missing required field");
    const auto& xi = ar.raw("xi");
    if (xi.is_string()) {
      if (xi.get<std::string>() != "omega") throw SchemaError(ar.path("xi"), "expected a number or \"omega\"");
    } else {
      at.xi = ar.number("xi");
    }
    at.w = ar.number("w");
    if (at.w < 0.0) throw SchemaError(ar.path("w"), "must be nonnegative");
    pm.measure.atoms.push_back(at);
  }
  try {
    pm.kernel.validate();
  } catch (const DomainError& e) {
    throw SchemaError(r.path("lambda"), e.what());
  }
  return pm;
}

// ---------------------------------------------------------------------------
// Reports

/// Run parameters echoed in every report entry.
struct RunEcho {
  SolParams params;
  double dt = 0.0;
  double T = 0.0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
};

inline Json to_json(const TestReport& r, const RunEcho& run) {
  auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  return Json{{"name", r.name},
              {"params",
               {{"p", run.params.p},
                {"q", run.params.q},
                {"a", run.params.a},
                {"dt", run.dt},
                {"T", run.T},
                {"N", r.N},
                {"seed", r.seed}}},
              {"statistic", num(r.value)},
              {"threshold", num(r.threshold)},
              {"pass", r.pass}};
}

// ---------------------------------------------------------------------------
// CSV (comma separated, '.' decimal point, LF line ends, header row)

inline std::string format_double(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << v;
  return os.str();
}

inline void write_path_csv(const std::filesystem::path& file, const BrownianPath& path) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string());
  out << "t,W,X,Y,Z,Vp,Vq\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << format_double(path.times[i]) << ',' << format_double(path.W[i]) << ','
        << format_double(path.X[i]) << ',' << format_double(path.Y[i]) << ','
        << format_double(path.Z[i]) << ',' << format_double(path.Vp[i]) << ','
        << format_double(path.Vq[i]) << '\n';
  }
}

inline void write_samples_csv(const std::filesystem::path& file, const SampleSet& s) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string());
  out << (s.label.empty() ? "value" : s.label) << '\n';
  for (double v : s.values) out << format_double(v) << '\n';
}

}  // namespace solgeo

#endif  // SOLGEO_IO_HPP
