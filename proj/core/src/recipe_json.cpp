#include "dst/recipe_json.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <json.hpp>

#include "dst/error.hpp"

namespace dst {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) { raise(ErrorKind::ParseError, what); }

void only_fields(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) parse_fail(std::string(where) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      parse_fail(std::string(where) + ": unknown field '" + key + "'");
    }
  }
}

const json& field(const json& j, std::string_view where, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    raise(ErrorKind::RecipeIncomplete, std::string(where) + ": missing '" + key + "'");
  }
  return *it;
}

double number(const json& j, std::string_view where, const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_number()) parse_fail(std::string(where) + "." + key + ": expected a number");
  return v.get<double>();
}

double as_number(const json& v, const std::string& where) {
  if (v.is_null()) raise(ErrorKind::RecipeIncomplete, where + ": missing value");
  if (!v.is_number()) parse_fail(where + ": expected a number");
  return v.get<double>();
}

int integer(const json& j, std::string_view where, const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_number_integer()) parse_fail(std::string(where) + "." + key + ": expected an integer");
  return v.get<int>();
}

bool boolean(const json& j, std::string_view where, const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_boolean()) parse_fail(std::string(where) + "." + key + ": expected a boolean");
  return v.get<bool>();
}

std::string text(const json& j, std::string_view where, const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_string()) parse_fail(std::string(where) + "." + key + ": expected a string");
  return v.get<std::string>();
}

template <std::size_t N>
std::array<double, N> numbers(const json& j, std::string_view where, const char* key) {
  const json& v = field(j, where, key);
  const std::string w = std::string(where) + "." + key;
  if (!v.is_array() || v.size() != N) parse_fail(w + ": expected " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = as_number(v[i], w);
  return out;
}

Mat3 matrix(const json& j, std::string_view where, const char* key) {
  const json& v = field(j, where, key);
  const std::string w = std::string(where) + "." + key;
  if (!v.is_array() || v.size() != 3) parse_fail(w + ": expected a 3x3 matrix");
  Mat3 m{};
  for (std::size_t r = 0; r < 3; ++r) {
    if (!v[r].is_array() || v[r].size() != 3) parse_fail(w + ": expected a 3x3 matrix");
    for (std::size_t c = 0; c < 3; ++c) m[r][c] = as_number(v[r][c], w);
  }
  return m;
}

// ---- point stages -----------------------------------------------------------------

json stage_to_json(const PointStage& s) {
  return std::visit(
      [](const auto& st) -> json {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, AffineStage>) {
          return {{"type", "affine"}, {"scale", st.scale}, {"offset", st.offset}};
        } else if constexpr (std::is_same_v<T, RiccatiStage>) {
          return {{"type", "riccati"}, {"t", st.t}, {"lo", st.lo}, {"hi", st.hi}};
        } else {
          json coef = json::array();
          for (const auto& c : st.coef) coef.push_back({c[0], c[1], c[2]});
          return {{"type", "flow"}, {"h", st.h}, {"speed", st.speed}, {"coef", coef}, {"lo", st.lo}, {"hi", st.hi}};
        }
      },
      s);
}

PointStage stage_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) parse_fail(where + ": expected an object");
  const std::string type = text(j, where, "type");
  if (type == "affine") {
    only_fields(j, where, {"type", "scale", "offset"});
    return AffineStage{number(j, where, "scale"), number(j, where, "offset")};
  }
  if (type == "riccati") {
    only_fields(j, where, {"type", "t", "lo", "hi"});
    return RiccatiStage{number(j, where, "t"), number(j, where, "lo"), number(j, where, "hi")};
  }
  if (type == "flow") {
    only_fields(j, where, {"type", "h", "speed", "coef", "lo", "hi"});
    FlowStage st;
    st.h = number(j, where, "h");
    st.speed = number(j, where, "speed");
    st.lo = number(j, where, "lo");
    st.hi = number(j, where, "hi");
    const json& coef = field(j, where, "coef");
    if (!coef.is_array() || coef.size() != FlowStage::kStages) {
      parse_fail(where + ".coef: expected " + std::to_string(FlowStage::kStages) + " triples");
    }
    for (std::size_t s = 0; s < FlowStage::kStages; ++s) {
      if (!coef[s].is_array() || coef[s].size() != 3) parse_fail(where + ".coef: expected triples");
      for (std::size_t m = 0; m < 3; ++m) st.coef[s][m] = as_number(coef[s][m], where + ".coef");
    }
    return st;
  }
  parse_fail(where + ": unknown stage type '" + type + "'");
}

// ---- channel recipes ----------------------------------------------------------------

json channel_to_json(const MomentRecipe& r, const char* name) {
  json stages = json::array();
  for (const auto& s : r.map.stages()) stages.push_back(stage_to_json(s));
  return {{"name", name},
          {"target",
           {{"moments", {r.target.m1, r.target.m2, r.target.m3, r.target.m4}},
            {"order", r.target.order},
            {"degenerate", r.target.degenerate}}},
          {"effective_order", r.effective_order},
          {"t0", r.t0},
          {"ts", r.ts},
          {"degenerate_source", r.degenerate_source},
          {"target_clamped", r.target_clamped},
          {"requested_m4", r.requested_m4},
          {"stages", stages}};
}

MomentRecipe channel_from_json(const json& j, const std::string& where) {
  only_fields(j, where,
              {"name", "target", "effective_order", "t0", "ts", "degenerate_source", "target_clamped",
               "requested_m4", "stages"});
  MomentRecipe r;
  const json& tgt = field(j, where, "target");
  const std::string tw = where + ".target";
  only_fields(tgt, tw, {"moments", "order", "degenerate"});
  const auto m = numbers<4>(tgt, tw, "moments");
  r.target.m1 = m[0];
  r.target.m2 = m[1];
  r.target.m3 = m[2];
  r.target.m4 = m[3];
  r.target.order = integer(tgt, tw, "order");
  r.target.degenerate = boolean(tgt, tw, "degenerate");
  r.effective_order = integer(j, where, "effective_order");
  r.t0 = number(j, where, "t0");
  r.ts = number(j, where, "ts");
  r.degenerate_source = boolean(j, where, "degenerate_source");
  r.target_clamped = boolean(j, where, "target_clamped");
  r.requested_m4 = number(j, where, "requested_m4");
  const json& stages = field(j, where, "stages");
  if (!stages.is_array()) parse_fail(where + ".stages: expected an array");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    r.map.push(stage_from_json(stages[i], where + ".stages[" + std::to_string(i) + "]"));
  }
  return r;
}

json matrix_to_json(const Mat3& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back({row[0], row[1], row[2]});
  return out;
}

json rgb_to_json(const Rgb& v) { return {v[0], v[1], v[2]}; }

json parse(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string recipe_to_json(const TransferRecipe& recipe, int indent) {
  json channels = json::array();
  for (std::size_t c = 0; c < 3; ++c) channels.push_back(channel_to_json(recipe.channels[c], kOpponentChannelNames[c]));
  json kernel = nullptr;
  if (recipe.kernel) {
    const auto& k = *recipe.kernel;
    kernel = {{"exponents", {k.exponents[0], k.exponents[1], k.exponents[2], k.exponents[3]}},
              {"ac_gain", k.ac_gain},
              {"dc_gain", k.dc_gain}};
  }
  const json j = {{"v", kRecipeSchemaVersion},
                  {"illuminant_scale", rgb_to_json(recipe.illuminant_scale)},
                  {"source_illuminant", rgb_to_json(recipe.source_illuminant.rgb)},
                  {"target_illuminant", rgb_to_json(recipe.target_illuminant.rgb)},
                  {"channels", channels},
                  {"kernel", kernel},
                  {"space",
                   {{"rgb_to_lms", matrix_to_json(recipe.space.rgb_to_lms)},
                    {"lms_to_ipt", matrix_to_json(recipe.space.lms_to_ipt)},
                    {"lms_to_rgb", matrix_to_json(recipe.space.lms_to_rgb)},
                    {"ipt_to_lms", matrix_to_json(recipe.space.ipt_to_lms)},
                    {"exponent", recipe.space.exponent}}},
                  {"gamma", recipe.gamma},
                  {"clamp", recipe.clamp == ClampPolicy::Clamp ? "clamp" : "preserve"},
                  {"negatives", recipe.negatives == NegativePolicy::Reject ? "reject" : "signed"}};
  return j.dump(indent);
}

TransferRecipe recipe_from_json(std::string_view text_in) {
  const json j = parse(text_in);
  const std::string w = "recipe";
  only_fields(j, w,
              {"v", "illuminant_scale", "source_illuminant", "target_illuminant", "channels", "kernel", "space",
               "gamma", "clamp", "negatives"});
  if (integer(j, w, "v") != kRecipeSchemaVersion) {
    parse_fail("recipe: unsupported schema version " + j["v"].dump());
  }
  TransferRecipe r;
  r.illuminant_scale = numbers<3>(j, w, "illuminant_scale");
  r.source_illuminant.rgb = numbers<3>(j, w, "source_illuminant");
  r.target_illuminant.rgb = numbers<3>(j, w, "target_illuminant");

  const json& channels = field(j, w, "channels");
  if (!channels.is_array() || channels.size() != 3) parse_fail("recipe.channels: expected 3 channels");
  for (std::size_t c = 0; c < 3; ++c) {
    r.channels[c] = channel_from_json(channels[c], "recipe.channels[" + std::to_string(c) + "]");
  }

  if (const auto it = j.find("kernel"); it != j.end() && !it->is_null()) {
    const std::string kw = "recipe.kernel";
    only_fields(*it, kw, {"exponents", "ac_gain", "dc_gain"});
    EquivalentKernel k;
    k.exponents = numbers<4>(*it, kw, "exponents");
    k.ac_gain = number(*it, kw, "ac_gain");
    k.dc_gain = number(*it, kw, "dc_gain");
    r.kernel = k;
  }

  const json& space = field(j, w, "space");
  const std::string sw = "recipe.space";
  only_fields(space, sw, {"rgb_to_lms", "lms_to_ipt", "lms_to_rgb", "ipt_to_lms", "exponent"});
  r.space.rgb_to_lms = matrix(space, sw, "rgb_to_lms");
  r.space.lms_to_ipt = matrix(space, sw, "lms_to_ipt");
  r.space.lms_to_rgb = matrix(space, sw, "lms_to_rgb");
  r.space.ipt_to_lms = matrix(space, sw, "ipt_to_lms");
  r.space.exponent = number(space, sw, "exponent");
  r.gamma = number(j, w, "gamma");

  const std::string clamp = text(j, w, "clamp");
  if (clamp != "clamp" && clamp != "preserve") parse_fail("recipe.clamp: expected 'clamp' or 'preserve'");
  r.clamp = clamp == "clamp" ? ClampPolicy::Clamp : ClampPolicy::Preserve;
  const std::string neg = text(j, w, "negatives");
  if (neg != "signed" && neg != "reject") parse_fail("recipe.negatives: expected 'signed' or 'reject'");
  r.negatives = neg == "reject" ? NegativePolicy::Reject : NegativePolicy::Signed;

  r.validate();
  return r;
}

TransferConfig config_from_json(std::string_view text_in) {
  TransferConfig cfg;
  if (text_in.find_first_not_of(" \t\r\n") == std::string_view::npos) return cfg;
  const json j = parse(text_in);
  const std::string w = "config";
  only_fields(j, w, {"v", "orders_i", "orders_chroma", "src_crop", "tgt_crop", "spectral", "clamp", "negatives",
                     "perturbation"});
  if (j.contains("v") && integer(j, w, "v") != kRecipeSchemaVersion) parse_fail("config: unsupported version");
  auto order = [&](const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    const int k = integer(j, w, key);
    if (k < 0 || k > 4) parse_fail(std::string("config.") + key + ": expected 0..4");
    return k;
  };
  const int oi = order("orders_i", cfg.orders[0]);
  const int oc = order("orders_chroma", cfg.orders[1]);
  cfg.orders = {oi, oc, oc};
  auto crop = [&](const char* key) -> std::optional<CropRect> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    const json& v = j[key];
    if (!v.is_array() || v.size() != 4) parse_fail(std::string("config.") + key + ": expected [x, y, w, h]");
    std::array<int, 4> a{};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!v[i].is_number_integer()) parse_fail(std::string("config.") + key + ": expected integers");
      a[i] = v[i].get<int>();
    }
    return CropRect{a[0], a[1], a[2], a[3]};
  };
  cfg.src_crop = crop("src_crop");
  cfg.tgt_crop = crop("tgt_crop");
  if (j.contains("spectral")) cfg.spectral = boolean(j, w, "spectral");
  if (j.contains("clamp")) cfg.clamp = boolean(j, w, "clamp") ? ClampPolicy::Clamp : ClampPolicy::Preserve;
  if (j.contains("negatives")) {
    const std::string neg = text(j, w, "negatives");
    if (neg != "signed" && neg != "reject") parse_fail("config.negatives: expected 'signed' or 'reject'");
    cfg.negatives = neg == "reject" ? NegativePolicy::Reject : NegativePolicy::Signed;
  }
  if (j.contains("perturbation")) {
    cfg.perturbation = number(j, w, "perturbation");
    if (!(cfg.perturbation >= 0.0)) parse_fail("config.perturbation: expected a non-negative number");
  }
  return cfg;
}

std::string config_to_json(const TransferConfig& cfg) {
  auto crop = [](const std::optional<CropRect>& c) -> json {
    if (!c) return nullptr;
    return {c->x, c->y, c->w, c->h};
  };
  const json j = {{"orders_i", cfg.orders[0]},
                  {"orders_chroma", cfg.orders[1]},
                  {"src_crop", crop(cfg.src_crop)},
                  {"tgt_crop", crop(cfg.tgt_crop)},
                  {"spectral", cfg.spectral},
                  {"clamp", cfg.clamp == ClampPolicy::Clamp},
                  {"negatives", cfg.negatives == NegativePolicy::Reject ? "reject" : "signed"},
                  {"perturbation", cfg.perturbation}};
  return j.dump();
}

}  // namespace dst
