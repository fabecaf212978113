#pragma once

#include <json.hpp>

#include "gridsim/model/generate.hpp"
#include "gridsim/model/types.hpp"

namespace gridsim::model {

void to_json(nlohmann::json& j, const Range& r);
void from_json(const nlohmann::json& j, Range& r);

void to_json(nlohmann::json& j, const PlatformSpec& s);
/// Missing optional fields keep their defaults; type errors throw InvalidSpec.
void from_json(const nlohmann::json& j, PlatformSpec& s);

void to_json(nlohmann::json& j, const SubmitPolicy& p);
void from_json(const nlohmann::json& j, SubmitPolicy& p);

void to_json(nlohmann::json& j, const Job& job);
void to_json(nlohmann::json& j, const NodeSpec& n);
void to_json(nlohmann::json& j, const LinkSpec& l);
void to_json(nlohmann::json& j, const SubGrid& s);
void to_json(nlohmann::json& j, const Region& r);
void to_json(nlohmann::json& j, const GridTopology& t);

}  // namespace gridsim::model
