#include <json.hpp>

#include "ats/error.hpp"
#include "ats/termkb.hpp"
#include "http_util.hpp"

namespace ats::termkb {

HttpNerClient::HttpNerClient(NerConfig config) : config_(std::move(config)) {
  http::parse_base_url(config_.base_url);
}

std::vector<NerMention> HttpNerClient::recognize(std::string_view text) {
  using nlohmann::json;
  const json body = {{"text", std::string(text)}};
  const auto res = http::post_json(http::parse_base_url(config_.base_url), "/ner", body.dump(), {}, config_.timeout);
  if (!res.ok) throw Error(Errc::NerUnavailable, config_.base_url + ": " + res.error);
  if (res.response.status < 200 || res.response.status >= 300) {
    throw Error(Errc::NerUnavailable, config_.base_url + " returned HTTP " + std::to_string(res.response.status));
  }
  try {
    const auto doc = json::parse(res.response.body);
    if (!doc.is_array()) throw Error(Errc::MalformedResponse, "NER response is not an array");
    std::vector<NerMention> out;
    for (const auto& m : doc) {
      out.push_back({m.at("start").get<std::size_t>(), m.at("end").get<std::size_t>(), m.at("label").get<std::string>(),
                     m.value("surface", std::string())});
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedResponse, std::string("NER response: ") + e.what());
  }
}

}  // namespace ats::termkb
