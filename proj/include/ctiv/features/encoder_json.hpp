#pragma once

#include <nlohmann/json.hpp>

#include "ctiv/features/encoder.hpp"

namespace ctiv::features {

nlohmann::json encoder_to_json_value(const EncoderSpec& spec);
EncoderSpec encoder_from_json_value(const nlohmann::json& doc);

}  // namespace ctiv::features
