#include "ats/review_service.hpp"

#include <httplib.h>

#include "ats/error.hpp"
#include "review_json.hpp"

namespace ats::review {
namespace {

using nlohmann::json;

int status_for(Errc code) {
  switch (code) {
    case Errc::UnknownRound:
    case Errc::UnknownTask: return 404;
    case Errc::RoundClosed:
    case Errc::RoundOpen:
    case Errc::RoundExists: return 409;
    case Errc::IncompleteAnswers: return 422;
    default: return 400;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  send_json(res, status, {{"error", std::string(code)}, {"message", std::string(message)}});
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    send_error(res, status_for(e.code()), to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, "BadRequest", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "Internal", e.what());
  }
}

int round_param(const httplib::Request& req) {
  return std::stoi(req.matches[1].str());
}

}  // namespace

struct ReviewService::Impl {
  ReviewStore* store;
  ServiceOptions options;
  httplib::Server server;

  void routes() {
    server.Get("/api/rounds", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        json out = json::array();
        for (const auto& r : store->rounds()) {
          out.push_back({{"round", r.number},
                         {"status", std::string(to_string(r.status))},
                         {"tasks", r.tasks.size()},
                         {"statements", r.statements.size()},
                         {"responses", store->responses(r.number).size()}});
        }
        send_json(res, 200, out);
      });
    });

    server.Get(R"(/api/rounds/(\d+)/tasks)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const int n = round_param(req);
        const auto r = store->round(n);
        const std::string reviewer = req.get_param_value("reviewer");
        std::map<std::string, SurveyResponse> prior;
        if (!reviewer.empty()) {
          for (auto& resp : store->responses(n)) {
            if (resp.reviewer_id == reviewer) prior[resp.cve_id] = std::move(resp);
          }
        }
        json statements = json::array();
        for (const auto& s : r.statements) statements.push_back(detail::to_json(s));
        json tasks = json::array();
        for (const auto& t : r.tasks) {
          json jt = detail::to_json(t);
          if (auto it = prior.find(t.cve_id); it != prior.end()) {
            jt["response"] = detail::to_json(it->second);
          } else {
            jt["response"] = nullptr;
          }
          tasks.push_back(std::move(jt));
        }
        send_json(res, 200,
                  {{"round", n},
                   {"status", std::string(to_string(r.status))},
                   {"statements", std::move(statements)},
                   {"tasks", std::move(tasks)}});
      });
    });

    server.Post(R"(/api/rounds/(\d+)/tasks/([^/]+)/response)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] {
                    const json body = json::parse(req.body);
                    if (!body.is_object() || !body.contains("answers")) {
                      throw Error(Errc::IncompleteAnswers, "body must carry an answers object");
                    }
                    json with_key = body;
                    with_key["cve_id"] = req.matches[2].str();
                    with_key["round"] = round_param(req);
                    if (!with_key.contains("reviewer_id")) with_key["reviewer_id"] = "";
                    auto stored = store->submit_response(detail::response_from_json(with_key));
                    send_json(res, 200, detail::to_json(stored));
                  });
                });

    server.Post(R"(/api/rounds/(\d+)/close)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        if (options.admin_token.empty() || req.get_header_value(kAdminTokenHeader) != options.admin_token) {
          send_error(res, 403, "Forbidden", "missing or wrong admin token");
          return;
        }
        const auto result = store->close_round(round_param(req));
        json decisions = json::array();
        for (const auto& d : result.decisions) decisions.push_back(detail::to_json(d));
        send_json(res, 200,
                  {{"decisions", std::move(decisions)}, {"warnings", result.warnings}, {"comments", result.comments}});
      });
    });

    server.Get(R"(/api/rounds/(\d+)/report)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const int n = round_param(req);
        const auto report = store->export_round(n);
        json decisions = json::array();
        for (const auto& d : store->decisions(n)) decisions.push_back(detail::to_json(d));
        send_json(res, 200,
                  {{"round", n},
                   {"csv", report.csv},
                   {"decisions", std::move(decisions)},
                   {"comments", store->comments(n)}});
      });
    });

    if (!options.static_dir.empty() && std::filesystem::is_directory(options.static_dir)) {
      server.set_mount_point("/", options.static_dir.string());
    } else {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("review service: see /api/rounds\n", "text/plain");
      });
    }
  }
};

ReviewService::ReviewService(ReviewStore& store, ServiceOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->store = &store;
  impl_->options = std::move(options);
  impl_->routes();
}

ReviewService::~ReviewService() { stop(); }

int ReviewService::start(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(Errc::IoError, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ReviewService::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw Error(Errc::IoError, "cannot listen on " + host + ":" + std::to_string(port));
}

void ReviewService::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace ats::review
