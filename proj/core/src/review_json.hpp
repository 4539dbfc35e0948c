#pragma once

#include <json.hpp>

#include "ats/review.hpp"

namespace ats::review::detail {

nlohmann::json to_json(const Statement& s);
Statement statement_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Task& t);
Task task_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SurveyResponse& r);
SurveyResponse response_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StatementTally& t);
nlohmann::json to_json(const AcceptanceDecision& d);

}  // namespace ats::review::detail
