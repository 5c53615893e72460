#include "wmcgrad/estimator_config.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wmcgrad {
namespace {

constexpr std::pair<EstimatorKind, const char*> kNames[] = {
    {EstimatorKind::kExact, "exact"},
    {EstimatorKind::kSfe, "sfe"},
    {EstimatorKind::kIndecater, "indecater"},
    {EstimatorKind::kWeightme, "weightme"},
    {EstimatorKind::kSte, "ste"},
    {EstimatorKind::kGumbel, "gumbel"},
    {EstimatorKind::kTnormProduct, "tnorm-product"},
    {EstimatorKind::kTnormGoedel, "tnorm-goedel"},
    {EstimatorKind::kKbest, "kbest"},
    {EstimatorKind::kKoptimal, "koptimal"},
    {EstimatorKind::kMpe, "mpe"},
    {EstimatorKind::kImle, "imle"},
    {EstimatorKind::kSemanticStrengthening, "semantic-strengthening"},
    {EstimatorKind::kUniformModel, "uniform-model"},
    {EstimatorKind::kCatlog, "catlog"},
    {EstimatorKind::kSampleTnormHybrid, "sample-tnorm-hybrid"},
};

bool uses_samples(const EstimatorConfig& c) {
  switch (c.kind) {
    case EstimatorKind::kSfe:
    case EstimatorKind::kIndecater:
    case EstimatorKind::kWeightme:
    case EstimatorKind::kUniformModel:
    case EstimatorKind::kSte:
    case EstimatorKind::kGumbel:
    case EstimatorKind::kImle:
    case EstimatorKind::kSampleTnormHybrid:
      return true;
    case EstimatorKind::kCatlog:
      return c.inner == EstimatorKind::kGumbel;
    default:
      return false;
  }
}

bool uses_temperature(const EstimatorConfig& c) {
  return c.kind == EstimatorKind::kGumbel ||
         (c.kind == EstimatorKind::kCatlog && c.inner == EstimatorKind::kGumbel);
}

size_t parse_count(const std::string& key, const std::string& v) {
  size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw std::invalid_argument("bad value for '" + key + "': " + v);
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw std::invalid_argument("bad value for '" + key + "': " + v);
  return out;
}

std::string format_real(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  // Prefer the shortest representation that reads back exactly.
  for (int prec = 1; prec <= 17; ++prec) {
    std::ostringstream t;
    t.precision(prec);
    t << x;
    if (std::stod(t.str()) == x) return t.str();
  }
  return os.str();
}

}  // namespace

const char* to_string(EstimatorKind kind) {
  for (auto [k, name] : kNames)
    if (k == kind) return name;
  return "?";
}

EstimatorKind estimator_kind_from_string(const std::string& name) {
  for (auto [k, n] : kNames)
    if (name == n) return k;
  throw std::invalid_argument("unknown estimator '" + name + "'");
}

EstimatorConfig EstimatorConfig::defaults(EstimatorKind kind) {
  EstimatorConfig c;
  c.kind = kind;
  switch (kind) {
    case EstimatorKind::kSfe: c.samples = 10000; break;
    case EstimatorKind::kWeightme:
    case EstimatorKind::kUniformModel: c.samples = 100; break;
    default: c.samples = uses_samples(c) ? 10 : 0; break;
  }
  if (kind == EstimatorKind::kUniformModel) c.sampler = SamplerKind::kUniformModel;
  return c;
}

EstimatorConfig EstimatorConfig::parse(const std::string& text) {
  const auto colon = text.find(':');
  EstimatorConfig c = defaults(estimator_kind_from_string(text.substr(0, colon)));
  if (colon == std::string::npos) return c;
  std::string rest = text.substr(colon + 1);
  // inner first: it decides whether s and temp apply
  std::vector<std::pair<std::string, std::string>> kv;
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("expected key=value, got '" + item + "'");
    kv.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  for (auto& [key, v] : kv)
    if (key == "inner") {
      if (c.kind != EstimatorKind::kCatlog) throw std::invalid_argument("'inner' applies to catlog only");
      c.inner = estimator_kind_from_string(v);
      if (c.inner != EstimatorKind::kExact && c.inner != EstimatorKind::kTnormProduct &&
          c.inner != EstimatorKind::kTnormGoedel && c.inner != EstimatorKind::kGumbel)
        throw std::invalid_argument("catlog inner must be exact, tnorm-product, tnorm-goedel or gumbel");
      if (c.inner == EstimatorKind::kGumbel && c.samples == 0) c.samples = 10;
    }
  for (auto& [key, v] : kv) {
    auto reject = [&] { throw std::invalid_argument("key '" + key + "' does not apply to " + wmcgrad::to_string(c.kind)); };
    if (key == "inner") continue;
    if (key == "s") {
      if (!uses_samples(c)) reject();
      c.samples = parse_count(key, v);
      if (c.samples == 0) throw std::invalid_argument("s must be at least 1");
    } else if (key == "k") {
      if (c.kind != EstimatorKind::kKbest && c.kind != EstimatorKind::kKoptimal) reject();
      c.k = static_cast<int>(parse_count(key, v));
      if (c.k < 1) throw std::invalid_argument("k must be at least 1");
    } else if (key == "kappa") {
      if (c.kind != EstimatorKind::kSemanticStrengthening) reject();
      c.kappa = static_cast<int>(parse_count(key, v));
    } else if (key == "temp") {
      if (!uses_temperature(c)) reject();
      c.temperature = parse_real(key, v);
      if (!(c.temperature > 0)) throw std::invalid_argument("temp must be positive");
    } else if (key == "noise") {
      if (c.kind != EstimatorKind::kImle) reject();
      c.noise_scale = parse_real(key, v);
      if (!(c.noise_scale >= 0)) throw std::invalid_argument("noise must be non-negative");
    } else if (key == "sampler") {
      if (c.kind != EstimatorKind::kWeightme) reject();
      c.sampler = sampler_kind_from_string(v);
      if (c.sampler == SamplerKind::kInterpretation)
        throw std::invalid_argument("weightme needs a model sampler");
    } else if (key == "baseline") {
      if (c.kind != EstimatorKind::kSfe) reject();
      if (v == "rloo") c.rloo = true;
      else if (v == "none") c.rloo = false;
      else throw std::invalid_argument("baseline must be rloo or none");
    } else if (key == "importance") {
      if (c.kind != EstimatorKind::kUniformModel) reject();
      if (v != "0" && v != "1") throw std::invalid_argument("importance must be 0 or 1");
      c.importance = v == "1";
    } else {
      throw std::invalid_argument("unknown key '" + key + "'");
    }
  }
  return c;
}

std::string EstimatorConfig::to_string() const {
  std::string out = wmcgrad::to_string(kind);
  std::vector<std::string> kv;
  if (kind == EstimatorKind::kCatlog) kv.push_back(std::string("inner=") + wmcgrad::to_string(inner));
  if (uses_samples(*this)) kv.push_back("s=" + std::to_string(samples));
  if (kind == EstimatorKind::kKbest || kind == EstimatorKind::kKoptimal) kv.push_back("k=" + std::to_string(k));
  if (kind == EstimatorKind::kSemanticStrengthening) kv.push_back("kappa=" + std::to_string(kappa));
  if (uses_temperature(*this)) kv.push_back("temp=" + format_real(temperature));
  if (kind == EstimatorKind::kImle) kv.push_back("noise=" + format_real(noise_scale));
  if (kind == EstimatorKind::kWeightme) kv.push_back(std::string("sampler=") + wmcgrad::to_string(sampler));
  if (kind == EstimatorKind::kSfe) kv.push_back(rloo ? "baseline=rloo" : "baseline=none");
  if (kind == EstimatorKind::kUniformModel) kv.push_back(importance ? "importance=1" : "importance=0");
  for (size_t i = 0; i < kv.size(); ++i) out += (i == 0 ? ":" : ",") + kv[i];
  return out;
}

}  // namespace wmcgrad
