#include "junctionflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "junctionflow/errors.hpp"

namespace jf {

using nlohmann::json;

namespace {

std::string num_str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Reads one JSON object, records which keys were consumed and reports the
// rest as unknown when `finish` runs.
class Section {
 public:
  Section(const json& j, std::string path, std::vector<std::string>& errs)
      : j_(j), path_(std::move(path)), errs_(errs) {}

  bool has(const std::string& key) const { return j_.contains(key); }

  std::optional<double> number(const std::string& key, bool required) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (required) errs_.push_back(at(key) + ": missing required number");
      return std::nullopt;
    }
    const json& v = j_.at(key);
    if (!v.is_number()) {
      errs_.push_back(at(key) + ": expected a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      errs_.push_back(at(key) + ": must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<long long> integer(const std::string& key, bool required) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (required) errs_.push_back(at(key) + ": missing required integer");
      return std::nullopt;
    }
    const json& v = j_.at(key);
    if (!v.is_number_integer()) {
      errs_.push_back(at(key) + ": expected an integer");
      return std::nullopt;
    }
    return v.get<long long>();
  }

  std::optional<std::string> string(const std::string& key, bool required) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (required) errs_.push_back(at(key) + ": missing required string");
      return std::nullopt;
    }
    const json& v = j_.at(key);
    if (!v.is_string()) {
      errs_.push_back(at(key) + ": expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key, bool required) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (required) errs_.push_back(at(key) + ": missing required array of numbers");
      return std::nullopt;
    }
    const json& v = j_.at(key);
    if (!v.is_array()) {
      errs_.push_back(at(key) + ": expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        errs_.push_back(at(key) + "[" + std::to_string(i) + "]: expected a number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  // Returns the sub-object, or nullptr when absent or of the wrong type.
  const json* object(const std::string& key, bool required) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (required) errs_.push_back(at(key) + ": missing required object");
      return nullptr;
    }
    const json& v = j_.at(key);
    if (!v.is_object()) {
      errs_.push_back(at(key) + ": expected an object");
      return nullptr;
    }
    return &v;
  }

  const json* array(const std::string& key, bool required) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (required) errs_.push_back(at(key) + ": missing required array");
      return nullptr;
    }
    const json& v = j_.at(key);
    if (!v.is_array()) {
      errs_.push_back(at(key) + ": expected an array");
      return nullptr;
    }
    return &v;
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& path() const { return path_; }

  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) errs_.push_back(at(it.key()) + ": unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& errs_;
  std::set<std::string> seen_;
};

void require(bool ok, std::vector<std::string>& errs, const std::string& msg) {
  if (!ok) errs.push_back(msg);
}

std::optional<FluxSpec> read_flux(Section& parent, const std::string& key, std::vector<std::string>& errs) {
  const json* j = parent.object(key, true);
  if (!j) return std::nullopt;
  Section s(*j, parent.at(key), errs);
  FluxSpec f;
  const auto family = s.string("family", true);
  const auto a = s.number("a", true);
  const auto c = s.number("c", true);
  std::optional<double> param;
  if (family && *family == "quadratic") {
    param = s.number("kappa", true);
  } else if (family && *family == "exponential") {
    param = s.number("s", true);
  } else if (family) {
    errs.push_back(s.at("family") + ": unknown flux family '" + *family +
                   "' (expected 'quadratic' or 'exponential')");
  }
  s.finish();
  if (!family || !a || !c || !param) return std::nullopt;
  f.family = *family;
  f.a = *a;
  f.c = *c;
  f.param = *param;
  try {
    (void)f.build();
  } catch (const Error& e) {
    errs.push_back(s.path() + ": " + e.what());
    return std::nullopt;
  }
  return f;
}

std::optional<BranchSpec> read_branch(const json& j, const std::string& path, std::vector<std::string>& errs) {
  if (!j.is_object()) {
    errs.push_back(path + ": expected an object");
    return std::nullopt;
  }
  Section s(j, path, errs);
  BranchSpec b;
  const auto a = s.number("a", true);
  const auto c = s.number("c", true);
  const auto kappa = s.number("kappa", false);
  const auto theta = s.number("theta", true);
  s.finish();
  if (!a || !c || !theta) return std::nullopt;
  b.a = *a;
  b.c = *c;
  b.kappa = kappa.value_or(1.0);
  b.theta = *theta;
  return b;
}

}  // namespace

ConvexFlux FluxSpec::build() const {
  if (family == "quadratic") return make_quadratic_flux(a, c, param);
  if (family == "exponential") return make_exponential_flux(a, c, param);
  throw ConfigError("unknown flux family '" + family + "'");
}

std::function<double(double)> InitialSpec::potential() const {
  if (type != "piecewise-affine") {
    const double l = kL, r = kR, u0 = u_at_zero;
    return [l, r, u0](double x) { return u0 + (x < 0.0 ? l * x : r * x); };
  }
  // Node values at the breakpoints, anchored at u(0).
  const std::vector<double> xs = breakpoints;
  const std::vector<double> ks = slopes;
  const std::size_t zero_seg = std::upper_bound(xs.begin(), xs.end(), 0.0) - xs.begin();
  std::vector<double> ux(xs.size());
  for (std::size_t i = zero_seg; i < xs.size(); ++i)
    ux[i] = (i == zero_seg ? u_at_zero + ks[zero_seg] * xs[i] : ux[i - 1] + ks[i] * (xs[i] - xs[i - 1]));
  for (std::size_t i = zero_seg; i-- > 0;)
    ux[i] = (i + 1 == zero_seg ? u_at_zero + ks[zero_seg] * xs[i] : ux[i + 1] - ks[i + 1] * (xs[i + 1] - xs[i]));
  const double u0 = u_at_zero;
  return [xs, ks, ux, zero_seg, u0](double x) {
    const std::size_t seg = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
    if (seg == zero_seg) return u0 + ks[seg] * x;
    if (seg > zero_seg) return ux[seg - 1] + ks[seg] * (x - xs[seg - 1]);
    return ux[seg] + ks[seg] * (x - xs[seg]);
  };
}

std::function<double(double)> InitialSpec::density() const {
  if (type != "piecewise-affine") {
    const double l = kL, r = kR;
    return [l, r](double x) { return x < 0.0 ? l : r; };
  }
  const std::vector<double> xs = breakpoints;
  const std::vector<double> ks = slopes;
  return [xs, ks](double x) {
    return ks[std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()];
  };
}

MultiBranchJunction MultiBranchSpec::build() const {
  auto side = [](const std::vector<BranchSpec>& v) {
    std::vector<WeightedBranch> out;
    for (const auto& b : v) out.push_back({make_concave_quadratic(b.a, b.c, b.kappa), b.theta});
    return out;
  };
  return MultiBranchJunction(side(incoming), side(outgoing));
}

Box ExperimentConfig::box() const { return Box(left.build(), right.build()); }

CouplingCondition ExperimentConfig::coupling() const {
  const Box b = box();
  if (coupling_spec.type == "limited") return CouplingCondition::limited(b, coupling_spec.A);
  if (coupling_spec.family == "godunov") return godunov_coupling(b);
  if (coupling_spec.family == "linear") return linear_coupling(b, coupling_spec.beta);
  return limited_as_general(b, coupling_spec.A);
}

Grid1D ExperimentConfig::grid() const { return Grid1D::make(grid_spec.dx, dt, grid_spec.half_width, T); }

nlohmann::json ExperimentConfig::to_json() const {
  auto flux_json = [](const FluxSpec& f) {
    json j{{"family", f.family}, {"a", f.a}, {"c", f.c}};
    j[f.family == "quadratic" ? "kappa" : "s"] = f.param;
    return j;
  };
  json j;
  j["flux"] = {{"left", flux_json(left)}, {"right", flux_json(right)}};
  json cj{{"type", coupling_spec.type}};
  if (coupling_spec.type == "limited") {
    cj["A"] = coupling_spec.A;
  } else {
    cj["family"] = coupling_spec.family;
    if (coupling_spec.family == "linear") cj["beta"] = coupling_spec.beta;
    if (coupling_spec.family == "limited") cj["A"] = coupling_spec.A;
  }
  j["coupling"] = cj;
  const Grid1D g = grid();
  j["grid"] = {{"dx", grid_spec.dx},
               {"dt", dt},
               {"dt_source", grid_spec.dt ? "config" : "auto"},
               {"safety", grid_spec.safety},
               {"half_width", grid_spec.half_width},
               {"j_min", g.j_min},
               {"j_max", g.j_max},
               {"n_steps", g.n_steps}};
  j["T"] = T;
  json ij{{"type", initial.type}};
  if (initial.type == "piecewise-affine") {
    ij["u_at_zero"] = initial.u_at_zero;
    ij["breakpoints"] = initial.breakpoints;
    ij["slopes"] = initial.slopes;
  } else {
    ij["kL"] = initial.kL;
    ij["kR"] = initial.kR;
  }
  j["initial"] = ij;
  j["outputs"] = {{"stride", stride}};
  j["seed"] = seed;
  j["converge"] = {{"levels", converge.levels},
                   {"dx0", converge.dx0.value_or(grid_spec.dx)},
                   {"dt_over_dx", converge.dt_over_dx.value_or(dt / grid_spec.dx)}};
  j["audit"] = {{"entropy_samples", audit.entropy_samples},
                {"entropy_tol", audit.entropy_tol},
                {"diagnostic_tol", audit.diagnostic_tol}};
  json q = json::array();
  for (const auto& k : germ_queries) q.push_back({k.kL, k.kR});
  j["germ"] = {{"queries", q}};
  if (multibranch) {
    auto side = [](const std::vector<BranchSpec>& v) {
      json arr = json::array();
      for (const auto& b : v) arr.push_back({{"a", b.a}, {"c", b.c}, {"kappa", b.kappa}, {"theta", b.theta}});
      return arr;
    };
    j["multibranch"] = {{"incoming", side(multibranch->incoming)},
                        {"outgoing", side(multibranch->outgoing)},
                        {"A", multibranch->A},
                        {"lambda", multibranch->lambda.value_or(0.5 * multibranch->A)},
                        {"alpha0", multibranch->alpha0}};
  }
  return j;
}

ExperimentConfig parse_config_string(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");

  std::vector<std::string> errs;
  ExperimentConfig cfg;
  Section top(root, "", errs);
  if (const auto seed = top.integer("seed", false)) {
    require(*seed >= 0, errs, "seed: must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(*seed);
  }


  // Fluxes.
  std::optional<FluxSpec> fl, fr;
  if (const json* fj = top.object("flux", true)) {
    Section fs(*fj, "flux", errs);
    fl = read_flux(fs, "left", errs);
    fr = read_flux(fs, "right", errs);
    fs.finish();
  }
  std::optional<Box> box;
  if (fl && fr) {
    cfg.left = *fl;
    cfg.right = *fr;
    try {
      box.emplace(fl->build(), fr->build());
    } catch (const Error& e) {
      errs.push_back(std::string("flux: ") + e.what());
    }
  }

  // Coupling.
  bool coupling_ok = false;
  if (const json* cj = top.object("coupling", true)) {
    Section cs(*cj, "coupling", errs);
    const auto type = cs.string("type", true);
    auto check_A = [&](double A) {
      if (!box) return true;
      const double H0 = box->H0();
      if (A < H0 || A > 0.0) {
        errs.push_back("coupling.A = " + num_str(A) + " lies outside the admissible interval [H0, 0] = [" +
                       num_str(H0) + ", 0]");
        return false;
      }
      return true;
    };
    if (type && *type == "limited") {
      cfg.coupling_spec.type = "limited";
      if (const auto A = cs.number("A", true)) {
        cfg.coupling_spec.A = *A;
        coupling_ok = check_A(*A);
      }
    } else if (type && *type == "general") {
      cfg.coupling_spec.type = "general";
      const auto fam = cs.string("family", true);
      if (fam && *fam == "godunov") {
        cfg.coupling_spec.family = *fam;
        coupling_ok = true;
      } else if (fam && *fam == "linear") {
        cfg.coupling_spec.family = *fam;
        const auto beta = cs.number("beta", false);
        cfg.coupling_spec.beta = beta.value_or(1.0);
        coupling_ok = cfg.coupling_spec.beta > 0.0;
        require(coupling_ok, errs, "coupling.beta: must be positive");
      } else if (fam && *fam == "limited") {
        cfg.coupling_spec.family = *fam;
        if (const auto A = cs.number("A", true)) {
          cfg.coupling_spec.A = *A;
          coupling_ok = check_A(*A);
        }
      } else if (fam) {
        errs.push_back("coupling.family: unknown general family '" + *fam +
                       "' (expected 'godunov', 'linear' or 'limited')");
      }
    } else if (type) {
      errs.push_back("coupling.type: unknown coupling type '" + *type + "' (expected 'limited' or 'general')");
    }
    cs.finish();
  }
  coupling_ok = coupling_ok && box.has_value();
  if (coupling_ok && cfg.coupling_spec.type == "general") {
    const ValidationReport rep = validate_coupling(cfg.coupling(), 2000, cfg.seed);
    if (!rep.pass)
      for (const auto& m : rep.messages) errs.push_back("coupling: " + m);
    coupling_ok = rep.pass;
  }

  // Time horizon.
  if (const auto T = top.number("T", true)) {
    cfg.T = *T;
    require(*T > 0.0, errs, "T: final time must be positive");
  }

  // Grid.
  if (const json* gj = top.object("grid", true)) {
    Section gs(*gj, "grid", errs);
    if (const auto dx = gs.number("dx", true)) {
      cfg.grid_spec.dx = *dx;
      require(*dx > 0.0, errs, "grid.dx: must be positive");
    }
    cfg.grid_spec.dt = gs.number("dt", false);
    if (cfg.grid_spec.dt) require(*cfg.grid_spec.dt > 0.0, errs, "grid.dt: must be positive");
    if (const auto sf = gs.number("safety", false)) {
      cfg.grid_spec.safety = *sf;
      require(*sf > 0.0 && *sf <= 1.0, errs, "grid.safety: must lie in (0, 1]");
      require(!cfg.grid_spec.dt, errs, "grid.safety: only meaningful when dt is omitted");
    }
    if (const auto w = gs.number("half_width", true)) {
      cfg.grid_spec.half_width = *w;
      require(*w > 0.0, errs, "grid.half_width: must be positive");
      require(!(cfg.grid_spec.dx > 0.0) || *w >= 4.0 * cfg.grid_spec.dx, errs,
              "grid.half_width: must span at least 4 cells");
    }
    gs.finish();
  }

  // Initial data.
  if (const json* ij = top.object("initial", true)) {
    Section is(*ij, "initial", errs);
    const auto type = is.string("type", true);
    if (type && (*type == "riemann" || *type == "affine-germ")) {
      cfg.initial.type = *type;
      const auto kL = is.number("kL", true);
      const auto kR = is.number("kR", true);
      if (kL && kR) {
        cfg.initial.kL = *kL;
        cfg.initial.kR = *kR;
        if (box && !box->contains(*kL, *kR, 0.0))
          errs.push_back("initial: (kL, kR) = (" + num_str(*kL) + ", " + num_str(*kR) +
                         ") lies outside the slope box [aL, cL] x [aR, cR]");
        else if (box && coupling_ok && *type == "affine-germ") {
          const double AF0 = flux_limiter(cfg.coupling());
          if (!germ_contains(AF0, {*kL, *kR}, *box))
            errs.push_back("initial: (kL, kR) = (" + num_str(*kL) + ", " + num_str(*kR) +
                           ") is not in the germ of the effective limiter A_F0 = " + num_str(AF0));
        }
      }
      if (const auto u = is.number("u_at_zero", false)) cfg.initial.u_at_zero = *u;
    } else if (type && *type == "piecewise-affine") {
      cfg.initial.type = *type;
      if (const auto u = is.number("u_at_zero", false)) cfg.initial.u_at_zero = *u;
      const auto xs = is.numbers("breakpoints", true);
      const auto ks = is.numbers("slopes", true);
      if (xs && ks) {
        bool ok = true;
        for (std::size_t i = 1; i < xs->size(); ++i)
          if (!((*xs)[i] > (*xs)[i - 1])) ok = false;
        require(ok, errs, "initial.breakpoints: must be strictly increasing");
        if (ks->size() != xs->size() + 1) {
          errs.push_back("initial.slopes: need breakpoints + 1 = " + std::to_string(xs->size() + 1) +
                         " entries, got " + std::to_string(ks->size()));
          ok = false;
        }
        if (ok && box) {
          for (std::size_t i = 0; i < ks->size(); ++i) {
            const double lo = i == 0 ? -INFINITY : (*xs)[i - 1];
            const double hi = i == xs->size() ? INFINITY : (*xs)[i];
            const double k = (*ks)[i];
            if (lo < 0.0 && !box->left().in_domain(k))
              errs.push_back("initial.slopes[" + std::to_string(i) + "] = " + num_str(k) +
                             " lies outside the left slope interval");
            if (hi > 0.0 && !box->right().in_domain(k))
              errs.push_back("initial.slopes[" + std::to_string(i) + "] = " + num_str(k) +
                             " lies outside the right slope interval");
          }
        }
        cfg.initial.breakpoints = *xs;
        cfg.initial.slopes = *ks;
      }
    } else if (type) {
      errs.push_back("initial.type: unknown initial data '" + *type +
                     "' (expected 'riemann', 'affine-germ' or 'piecewise-affine')");
    }
    is.finish();
  }

  // Outputs.
  if (const json* oj = top.object("outputs", false)) {
    Section os(*oj, "outputs", errs);
    if (const auto st = os.integer("stride", false)) {
      cfg.stride = static_cast<int>(*st);
      require(*st >= 1, errs, "outputs.stride: must be at least 1");
    }
    os.finish();
  }

  if (const json* cj = top.object("converge", false)) {
    Section cs(*cj, "converge", errs);
    if (const auto l = cs.integer("levels", false)) {
      cfg.converge.levels = static_cast<int>(*l);
      require(*l >= 1 && *l <= 8, errs, "converge.levels: must lie in [1, 8]");
    }
    cfg.converge.dx0 = cs.number("dx0", false);
    if (cfg.converge.dx0) require(*cfg.converge.dx0 > 0.0, errs, "converge.dx0: must be positive");
    cfg.converge.dt_over_dx = cs.number("dt_over_dx", false);
    if (cfg.converge.dt_over_dx)
      require(*cfg.converge.dt_over_dx > 0.0, errs, "converge.dt_over_dx: must be positive");
    cs.finish();
  }

  if (const json* aj = top.object("audit", false)) {
    Section as(*aj, "audit", errs);
    if (const auto n = as.integer("entropy_samples", false)) {
      cfg.audit.entropy_samples = static_cast<int>(*n);
      require(*n >= 1, errs, "audit.entropy_samples: must be at least 1");
    }
    if (const auto t = as.number("entropy_tol", false)) {
      cfg.audit.entropy_tol = *t;
      require(*t >= 0.0, errs, "audit.entropy_tol: must be nonnegative");
    }
    if (const auto t = as.number("diagnostic_tol", false)) {
      cfg.audit.diagnostic_tol = *t;
      require(*t >= 0.0, errs, "audit.diagnostic_tol: must be nonnegative");
    }
    as.finish();
  }

  if (const json* gj = top.object("germ", false)) {
    Section gs(*gj, "germ", errs);
    if (const json* q = gs.array("queries", false)) {
      for (std::size_t i = 0; i < q->size(); ++i) {
        const json& e = (*q)[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
          errs.push_back("germ.queries[" + std::to_string(i) + "]: expected [kL, kR]");
          continue;
        }
        cfg.germ_queries.push_back({e[0].get<double>(), e[1].get<double>()});
      }
    }
    gs.finish();
  }

  if (const json* mj = top.object("multibranch", false)) {
    Section ms(*mj, "multibranch", errs);
    MultiBranchSpec mb;
    bool ok = true;
    for (const char* side : {"incoming", "outgoing"}) {
      const json* arr = ms.array(side, true);
      if (!arr) {
        ok = false;
        continue;
      }
      auto& dst = std::string(side) == "incoming" ? mb.incoming : mb.outgoing;
      for (std::size_t i = 0; i < arr->size(); ++i) {
        auto b = read_branch((*arr)[i], "multibranch." + std::string(side) + "[" + std::to_string(i) + "]", errs);
        if (b)
          dst.push_back(*b);
        else
          ok = false;
      }
    }
    if (const auto A = ms.number("A", true))
      mb.A = *A;
    else
      ok = false;
    mb.lambda = ms.number("lambda", false);
    if (const auto a0 = ms.integer("alpha0", false)) mb.alpha0 = static_cast<int>(*a0);
    ms.finish();
    if (ok) {
      try {
        const MultiBranchJunction J = mb.build();
        if (!(mb.A > 0.0 && mb.A <= J.A0()))
          errs.push_back("multibranch.A = " + num_str(mb.A) + " lies outside the admissible interval (0, A0] = (0, " +
                         num_str(J.A0()) + "]");
        const double lam = mb.lambda.value_or(0.5 * mb.A);
        if (!(lam > 0.0 && lam < mb.A)) errs.push_back("multibranch.lambda: must lie in (0, A)");
        if (mb.alpha0 < 0 || static_cast<std::size_t>(mb.alpha0) >= J.size())
          errs.push_back("multibranch.alpha0: branch index out of range");
        cfg.multibranch = mb;
      } catch (const Error& e) {
        errs.push_back(std::string("multibranch: ") + e.what());
      }
    }
  }

  top.finish();

  // Time step: explicit or safety times the CFL bound.
  if (errs.empty()) {
    const CouplingCondition F = cfg.coupling();
    if (cfg.grid_spec.dt) {
      cfg.dt = *cfg.grid_spec.dt;
    } else {
      const Grid1D probe = Grid1D::make(cfg.grid_spec.dx, cfg.grid_spec.dx, cfg.grid_spec.half_width, cfg.T);
      cfg.dt = cfg.grid_spec.safety * make_cfl_report(probe, F, true).dt_max;
    }
  }

  if (!errs.empty()) {
    std::string msg;
    for (const auto& e : errs) msg += e + "\n";
    msg.pop_back();
    throw ConfigError(msg);
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str());
}

}  // namespace jf
