#pragma once

#include <cstddef>
#include <memory>
#include <string>

namespace dst::app {

struct ServiceOptions {
  std::string bind = "127.0.0.1";
  int port = 8080;
  /// Requests with a larger body are answered with 413.
  std::size_t max_body_bytes = std::size_t{64} << 20;
  /// Concurrent request handlers; 0 means one per hardware thread.
  unsigned workers = 0;
};

/// Port from DST_PORT when set and valid, `fallback` otherwise.
[[nodiscard]] int port_from_env(int fallback);

/// Local HTTP front end:
///   GET  /api/health     -> {"status":"ok"}
///   POST /api/transfer   multipart src, tgt [, config]  -> {image_png, width, height, recipe, warnings}
///   POST /api/optics     multipart src, t, tprime [, config] -> {image_png, width, height, kernel}
///   POST /api/lut[?size=n]  recipe JSON -> .cube text
/// Malformed requests get 400, pipeline failures 422 with
/// {"error", "stage", "channel", "message"}.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the socket; port 0 picks a free one. Returns the bound port or -1.
  int bind();
  /// Serves until stop(). Requires a successful bind().
  bool run();
  void stop();
  [[nodiscard]] bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dst::app
