#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include "ats/review.hpp"

namespace ats::review {

struct ServiceOptions {
  std::filesystem::path static_dir;  // served at "/" when set and present
  std::string admin_token;           // required in X-Admin-Token to close a round
};

inline constexpr const char* kAdminTokenHeader = "X-Admin-Token";

/// JSON HTTP front end for a ReviewStore:
///   GET  /api/rounds
///   GET  /api/rounds/{n}/tasks?reviewer={id}
///   POST /api/rounds/{n}/tasks/{cve}/response
///   POST /api/rounds/{n}/close
///   GET  /api/rounds/{n}/report
class ReviewService {
 public:
  ReviewService(ReviewStore& store, ServiceOptions options = {});
  ~ReviewService();
  ReviewService(const ReviewService&) = delete;
  ReviewService& operator=(const ReviewService&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port;
  /// the bound port is returned.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving on the calling thread.
  void listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace ats::review
