#include "dst_app/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <json.hpp>
#include <thread>

#include "dst/error.hpp"
#include "dst/imgio.hpp"
#include "dst/lut.hpp"
#include "dst/pipeline.hpp"
#include "dst/recipe_json.hpp"
#include "dst_app/jobs.hpp"

namespace dst::app {

namespace {

using nlohmann::json;

/// Raised for requests that cannot be interpreted at all (400).
struct BadRequest {
  std::string message;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const Error& e) {
  send_json(res, status,
            {{"error", std::string(to_string(e.kind()))},
             {"stage", e.stage()},
             {"channel", e.channel()},
             {"message", e.what()}});
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::UnsupportedFormat:
    case ErrorKind::CorruptFile:
    case ErrorKind::RecipeIncomplete:
      return true;
    default:
      return false;
  }
}

/// Runs a handler and maps failures onto status codes.
template <class F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const BadRequest& e) {
    send_json(res, 400, {{"error", "BadRequest"}, {"stage", ""}, {"channel", ""}, {"message", e.message}});
  } catch (const Error& e) {
    send_error(res, is_input_error(e.kind()) ? 400 : 422, e);
  } catch (const json::exception& e) {
    send_json(res, 400, {{"error", "ParseError"}, {"stage", ""}, {"channel", ""}, {"message", e.what()}});
  } catch (const std::exception& e) {
    send_json(res, 500, {{"error", "Internal"}, {"stage", ""}, {"channel", ""}, {"message", e.what()}});
  }
}

void require_multipart(const httplib::Request& req) {
  if (!req.is_multipart_form_data()) throw BadRequest{"expected multipart/form-data"};
}

LoadedImage image_part(const httplib::Request& req, const std::string& name) {
  if (!req.has_file(name)) throw BadRequest{"missing form field '" + name + "'"};
  const std::string& content = req.get_file_value(name).content;
  try {
    return decode_image(Bytes(content.begin(), content.end()));
  } catch (const Error& e) {
    throw e.with_context("decode", name);
  }
}

std::string text_part(const httplib::Request& req, const std::string& name) {
  return req.has_file(name) ? req.get_file_value(name).content : std::string{};
}

json image_fields(const RgbImage& img) {
  const Bytes png = encode_png(img);
  return {{"image_png", httplib::detail::base64_encode(std::string(png.begin(), png.end()))},
          {"width", img.width},
          {"height", img.height}};
}

json warnings_of(std::initializer_list<const LoadedImage*> images, std::initializer_list<const char*> names) {
  json out = json::array();
  auto name = names.begin();
  for (const LoadedImage* img : images) {
    for (const auto& w : img->warnings) out.push_back(std::string(*name) + ": " + w);
    ++name;
  }
  return out;
}

void handle_transfer(const httplib::Request& req, httplib::Response& res) {
  require_multipart(req);
  const TransferConfig cfg = config_from_json(text_part(req, "config"));
  const LoadedImage src = image_part(req, "src");
  const LoadedImage tgt = image_part(req, "tgt");
  const StyleTransfer r = transfer_style(src.image, tgt.image, cfg);
  json body = image_fields(r.image);
  body["recipe"] = json::parse(recipe_to_json(r.recipe));
  body["warnings"] = warnings_of({&src, &tgt}, {"src", "tgt"});
  send_json(res, 200, body);
}

void handle_optics(const httplib::Request& req, httplib::Response& res) {
  require_multipart(req);
  std::optional<CropRect> crop;
  if (const std::string cfg = text_part(req, "config"); !cfg.empty()) {
    const json j = json::parse(cfg);
    if (!j.is_object()) throw BadRequest{"config must be an object"};
    for (const auto& [key, value] : j.items()) {
      if (key != "diff_crop") throw BadRequest{"config: unknown field '" + key + "'"};
      if (value.is_null()) continue;
      const auto v = value.get<std::vector<int>>();
      if (v.size() != 4) throw BadRequest{"config.diff_crop: expected [x, y, w, h]"};
      crop = CropRect{v[0], v[1], v[2], v[3]};
    }
  }
  const LoadedImage src = image_part(req, "src");
  const LoadedImage t = image_part(req, "t");
  const LoadedImage tprime = image_part(req, "tprime");
  const OpticsTransfer r = transfer_optics(src.image, t.image, tprime.image, crop);
  json body = image_fields(r.image);
  body["kernel"] = {{"exponents", r.kernel.exponents}, {"ac_gain", r.kernel.ac_gain}, {"dc_gain", r.kernel.dc_gain}};
  body["warnings"] = warnings_of({&src, &t, &tprime}, {"src", "t", "tprime"});
  send_json(res, 200, body);
}

void handle_lut(const httplib::Request& req, httplib::Response& res) {
  int size = kDefaultLutSize;
  if (req.has_param("size")) {
    const std::string s = req.get_param_value("size");
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), size);
    if (ec != std::errc{} || end != s.data() + s.size() || size < 2 || size > 256) {
      throw BadRequest{"size must be an integer in 2..256"};
    }
  }
  const TransferRecipe recipe = recipe_from_json(req.body);
  res.status = 200;
  res.set_content(cube_for_recipe(recipe, size), "text/plain");
  res.set_header("Content-Disposition", "attachment; filename=\"look.cube\"");
}

}  // namespace

int port_from_env(int fallback) {
  const char* env = std::getenv("DST_PORT");
  if (env == nullptr) return fallback;
  const std::string_view s(env);
  int port = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), port);
  if (ec != std::errc{} || end != s.data() + s.size() || port < 0 || port > 65535) return fallback;
  return port;
}

struct Service::Impl {
  ServiceOptions options;
  httplib::Server server;
  bool bound = false;
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  auto& svr = impl_->server;
  const unsigned workers =
      impl_->options.workers != 0 ? impl_->options.workers : std::max(1u, std::thread::hardware_concurrency());
  svr.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
  svr.set_payload_max_length(impl_->options.max_body_bytes);

  svr.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });
  svr.Post("/api/transfer", [](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { handle_transfer(req, res); });
  });
  svr.Post("/api/optics", [](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { handle_optics(req, res); });
  });
  svr.Post("/api/lut", [](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { handle_lut(req, res); });
  });
  svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    send_json(res, res.status,
              {{"error", httplib::status_message(res.status)}, {"stage", ""}, {"channel", ""}, {"message", ""}});
  });
}

Service::~Service() { stop(); }

int Service::bind() {
  auto& o = impl_->options;
  int port = o.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(o.bind);
  } else if (!impl_->server.bind_to_port(o.bind, port)) {
    port = -1;
  }
  impl_->bound = port >= 0;
  return port;
}

bool Service::run() { return impl_->bound && impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

bool Service::running() const { return impl_->server.is_running(); }

}  // namespace dst::app
