#include "bcpar/equivalence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <json.hpp>

#include "bcpar/error.hpp"

namespace bcpar {

using nlohmann::json;

double eval_scale(const std::string& text, std::int64_t n) {
  if (text == "n") return static_cast<double>(n);
  if (text == "log2n") return std::floor(std::log2(static_cast<double>(std::max<std::int64_t>(n, 1))));
  std::size_t used = 0;
  double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad scale expression '" + text + "'");
  return v;
}

namespace {

std::string scale_text(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  if (j.is_number()) {
    json copy = j;
    return copy.dump();
  }
  throw std::invalid_argument("expected a number or a scale name");
}

}  // namespace

InputSpec parse_input_spec(const std::string& text) {
  InputSpec spec;
  json j = json::parse(text);
  for (const auto& p : j.at("params")) {
    ParamSpec ps;
    if (p.contains("dims"))
      for (const auto& d : p["dims"]) ps.dims.push_back(scale_text(d));
    if (p.contains("range")) {
      ps.lo = p["range"].at(0).get<double>();
      ps.hi = p["range"].at(1).get<double>();
    }
    if (p.contains("value")) ps.value = scale_text(p["value"]);
    spec.params.push_back(std::move(ps));
  }
  return spec;
}

std::string input_spec_to_json(const InputSpec& spec) {
  json arr = json::array();
  for (const auto& p : spec.params) {
    json o = json::object();
    if (!p.dims.empty()) o["dims"] = p.dims;
    if (p.lo && p.hi) o["range"] = {*p.lo, *p.hi};
    if (!p.value.empty()) o["value"] = p.value;
    arr.push_back(o);
  }
  return json{{"params", arr}}.dump();
}

namespace {

struct Gen {
  std::mt19937_64 rng;
  Heap* heap;
  std::int64_t n;

  Value element(ElemKind k, const ParamSpec* ps) {
    bool fp = k == ElemKind::Float || k == ElemKind::Double;
    double lo = ps && ps->lo ? *ps->lo : (fp ? -1.0 : 0.0);
    double hi = ps && ps->hi ? *ps->hi : (fp ? 1.0 : static_cast<double>(std::max<std::int64_t>(n, 1)));
    if (fp) {
      double u = std::uniform_real_distribution<double>(lo, hi)(rng);
      return k == ElemKind::Float ? Value::of_float(static_cast<float>(u)) : Value::of_double(u);
    }
    auto a = static_cast<std::int64_t>(std::ceil(lo));
    auto b = static_cast<std::int64_t>(std::ceil(hi)) - 1;
    if (b < a) b = a;
    std::int64_t v = std::uniform_int_distribution<std::int64_t>(a, b)(rng);
    switch (k) {
      case ElemKind::Long: return Value::of_long(v);
      case ElemKind::Byte: return Value::of_int(static_cast<std::int8_t>(v));
      case ElemKind::Short: return Value::of_int(static_cast<std::int16_t>(v));
      case ElemKind::Char: return Value::of_int(static_cast<std::uint16_t>(v));
      default: return Value::of_int(static_cast<std::int32_t>(v));
    }
  }

  Value array(const std::string& type, const std::vector<std::int32_t>& dims, std::size_t level, const ParamSpec* ps) {
    std::int32_t len = level < dims.size() ? dims[level] : 0;
    Value ref = heap->new_array(type, len);
    std::string elem = type.substr(1);
    ElemKind ek = descriptor_elem_kind(elem);
    for (std::int32_t i = 0; i < len; ++i) {
      Value v;
      if (ek == ElemKind::Ref) {
        if (elem[0] != '[' || level + 1 >= dims.size()) continue;  // stays null
        v = array(elem, dims, level + 1, ps);
      } else {
        v = element(ek, ps);
      }
      heap->array(ref)->data[static_cast<std::size_t>(i)] = v;
    }
    return ref;
  }
};

}  // namespace

GeneratedInput generate_inputs(const std::string& owner, const std::string& desc, bool is_static,
                               const InputSpec& spec, std::int64_t n, std::uint64_t seed) {
  GeneratedInput in;
  Gen g{std::mt19937_64(seed), &in.heap, n};
  if (!is_static) in.args.push_back(in.heap.new_instance(owner));
  auto sig = parse_method_descriptor(desc);
  for (std::size_t i = 0; i < sig.params.size(); ++i) {
    const std::string& p = sig.params[i];
    const ParamSpec* ps = i < spec.params.size() ? &spec.params[i] : nullptr;
    if (p[0] == '[') {
      std::size_t rank = static_cast<std::size_t>(std::count(p.begin(), p.end(), '['));
      std::vector<std::int32_t> dims;
      if (ps && !ps->dims.empty()) {
        for (const auto& d : ps->dims) dims.push_back(static_cast<std::int32_t>(eval_scale(d, n)));
      } else {
        bool prim_elem = descriptor_elem_kind(p.substr(rank)) != ElemKind::Ref;
        dims.assign(prim_elem ? rank : 0, static_cast<std::int32_t>(n));
      }
      in.args.push_back(dims.empty() ? Value::null() : g.array(p, dims, 0, ps));
      continue;
    }
    Kind k = descriptor_kind(p);
    double v = (ps && !ps->value.empty()) ? eval_scale(ps->value, n) : static_cast<double>(n);
    switch (k) {
      case Kind::Int: in.args.push_back(Value::of_int(static_cast<std::int32_t>(v))); break;
      case Kind::Long: in.args.push_back(Value::of_long(static_cast<std::int64_t>(v))); break;
      case Kind::Float: in.args.push_back(Value::of_float(static_cast<float>(v))); break;
      case Kind::Double: in.args.push_back(Value::of_double(v)); break;
      default: in.args.push_back(Value::null()); break;
    }
  }
  return in;
}

// ------------------------------------------------------------- comparison

namespace {

struct Comparer {
  const Heap& ha;
  const Heap& hb;
  double tol;
  double& max_dev;
  std::map<std::uint64_t, std::uint64_t> seen;

  std::optional<Witness> diff(const std::string& where, Value a, Value b) {
    return Witness{{}, where, to_string(a), to_string(b)};
  }

  bool float_equal(double x, double y, bool single) {
    if (std::isnan(x) && std::isnan(y)) return true;
    if (tol == 0) {
      return single ? std::bit_cast<std::uint32_t>(static_cast<float>(x)) == std::bit_cast<std::uint32_t>(static_cast<float>(y))
                    : std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
    }
    if (x == y) return true;
    double scale = std::max(std::fabs(x), std::fabs(y));
    double rel = std::fabs(x - y) / scale;
    if (std::isfinite(rel)) max_dev = std::max(max_dev, rel);
    return rel <= tol;
  }

  std::optional<Witness> value(const std::string& where, Value a, Value b) {
    if (a.tag != b.tag) return diff(where, a, b);
    switch (a.tag) {
      case Value::Tag::Float:
        if (tol == 0 && a.f() != b.f() && !(std::isnan(a.f()) && std::isnan(b.f()))) {
          max_dev = std::max(max_dev, std::fabs(static_cast<double>(a.f()) - b.f()) /
                                          std::max(std::fabs(static_cast<double>(a.f())), std::fabs(static_cast<double>(b.f()))));
        }
        return float_equal(a.f(), b.f(), true) ? std::nullopt : diff(where, a, b);
      case Value::Tag::Double:
        if (tol == 0 && a.d() != b.d() && !(std::isnan(a.d()) && std::isnan(b.d()))) {
          max_dev = std::max(max_dev, std::fabs(a.d() - b.d()) / std::max(std::fabs(a.d()), std::fabs(b.d())));
        }
        return float_equal(a.d(), b.d(), false) ? std::nullopt : diff(where, a, b);
      case Value::Tag::Ref:
        return ref(where, a, b);
      default:
        return a.bits == b.bits ? std::nullopt : diff(where, a, b);
    }
  }

  std::optional<Witness> ref(const std::string& where, Value a, Value b) {
    bool na = a.ref() == 0, nb = b.ref() == 0;
    if (na || nb) return na == nb ? std::nullopt : diff(where, a, b);
    auto [it, fresh] = seen.emplace(a.ref(), b.ref());
    if (!fresh) return it->second == b.ref() ? std::nullopt : diff(where + " (sharing)", a, b);
    const ArrayObject* xa = ha.array(a);
    const ArrayObject* xb = hb.array(b);
    if (xa || xb) {
      if (!xa || !xb || xa->type != xb->type) return diff(where, a, b);
      if (xa->data.size() != xb->data.size())
        return Witness{{}, where + ".length", std::to_string(xa->data.size()), std::to_string(xb->data.size())};
      for (std::size_t i = 0; i < xa->data.size(); ++i)
        if (auto w = value(where + "[" + std::to_string(i) + "]", xa->data[i], xb->data[i])) return w;
      return std::nullopt;
    }
    const InstanceObject* ia = ha.instance(a);
    const InstanceObject* ib = hb.instance(b);
    if (!ia || !ib || ia->class_name != ib->class_name) return diff(where, a, b);
    std::set<std::string> names;
    for (const auto& [k, _] : ia->fields) names.insert(k);
    for (const auto& [k, _] : ib->fields) names.insert(k);
    for (const auto& k : names) {
      auto fa = ia->fields.find(k);
      auto fb = ib->fields.find(k);
      if (fa == ia->fields.end() || fb == ib->fields.end()) {
        Value present = fa == ia->fields.end() ? fb->second : fa->second;
        Value zero = Value::zero_of(present.kind());
        if (auto w = value(where + "." + k, fa == ia->fields.end() ? zero : fa->second,
                           fb == ib->fields.end() ? zero : fb->second))
          return w;
        continue;
      }
      if (auto w = value(where + "." + k, fa->second, fb->second)) return w;
    }
    return std::nullopt;
  }
};

}  // namespace

std::optional<Witness> compare_values(const Heap& ha, Value a, const Heap& hb, Value b, const std::string& where,
                                      double tolerance, double& max_dev) {
  Comparer c{ha, hb, tolerance, max_dev, {}};
  return c.value(where, a, b);
}

EquivalenceVerdict check_equivalence(const RunTarget& serial, const RunTarget& variant, const EquivalenceConfig& cfg) {
  EquivalenceVerdict v;
  GeneratedInput base = generate_inputs(serial.owner, serial.desc, serial.is_static, cfg.inputs, cfg.n, cfg.seed);
  ExecResult sr = exec_method(*serial.classes, serial.owner, serial.method, serial.desc, base.args, base.heap, cfg.exec);
  if (sr.trap) {
    v.error = "serial run trapped: " + std::string(trap_name(sr.trap.kind)) + " " + sr.trap.detail;
    return v;
  }
  std::mt19937_64 rng(cfg.seed ^ 0x5DEECE66DULL);
  constexpr int kPermSize = 64;
  for (int k = 0; k < cfg.n_schedules; ++k) {
    std::vector<int> perm(kPermSize);
    for (int i = 0; i < kPermSize; ++i) perm[static_cast<std::size_t>(i)] = i;
    if (k > 0) std::shuffle(perm.begin(), perm.end(), rng);  // schedule 0 is start order
    Schedule sched = Schedule::permuted(perm);
    if (cfg.interleaved) {
      sched.mode = Schedule::Mode::Interleaved;
      sched.seed = cfg.seed + static_cast<std::uint64_t>(k);
    }
    GeneratedInput in = generate_inputs(variant.owner, variant.desc, variant.is_static, cfg.inputs, cfg.n, cfg.seed);
    ExecResult r = exec_method(*variant.classes, variant.owner, variant.method, variant.desc, in.args, in.heap,
                               cfg.exec, sched);
    ++v.schedules_run;
    std::size_t width = 0;
    for (const auto& b : r.profile.batches) width = std::max(width, b.task_steps.size());
    std::vector<int> shown;  // task order actually used
    for (int x : perm)
      if (static_cast<std::size_t>(x) < width) shown.push_back(x);
    if (r.trap) {
      v.witness = Witness{shown, "trap", "no trap",
                          std::string(trap_name(r.trap.kind)) + " in task " + std::to_string(r.trap.task) + ": " +
                              r.trap.detail};
      return v;
    }
    std::optional<Witness> w;
    Comparer c{base.heap, in.heap, cfg.tolerance, v.max_deviation, {}};
    if (sr.ret.has_value() != r.ret.has_value()) {
      w = Witness{{}, "return", sr.ret ? to_string(*sr.ret) : "void", r.ret ? to_string(*r.ret) : "void"};
    } else if (sr.ret) {
      w = c.value("return", *sr.ret, *r.ret);
    }
    for (std::size_t i = 0; !w && i < base.args.size(); ++i) w = c.value("arg" + std::to_string(i), base.args[i], in.args[i]);
    if (w) {
      w->schedule = shown;
      v.witness = w;
      return v;
    }
  }
  v.pass = true;
  return v;
}

void add_variant(ClassPath& cp, const ParallelVariant& v) {
  cp.add_ref(v.driver);
  for (const auto& t : v.tasks) cp.add_ref(t);
}

EquivalenceVerdict check_equivalence(const ParallelVariant& v, const ClassPath* support, const EquivalenceConfig& cfg) {
  ClassPath cp;
  if (support)
    for (const auto& name : support->names())
      if (const ClassModel* m = support->find(name)) cp.add_ref(*m);
  add_variant(cp, v);
  const MethodEntry* m = v.driver.find_method(v.method, v.descriptor);
  bool is_static = m ? m->is_static() : true;
  RunTarget serial{&cp, v.driver.name(), v.serial_name, v.descriptor, is_static};
  RunTarget par{&cp, v.driver.name(), v.method, v.descriptor, is_static};
  return check_equivalence(serial, par, cfg);
}

}  // namespace bcpar
