#include "mdfrac/variant.hpp"

namespace mdfrac {

VariantFlags flags_of(ModelVariant variant)
{
    switch (variant) {
    case ModelVariant::full: return {false, false, false};
    case ModelVariant::I: return {false, true, true};
    case ModelVariant::IR: return {true, true, false};
    case ModelVariant::II: return {false, false, true};
    case ModelVariant::IIR: return {true, false, false};
    }
    return {};
}

MeshMode mesh_mode_of(ModelVariant variant)
{
    if (variant == ModelVariant::full) {
        return MeshMode::full;
    }
    return flags_of(variant).rectified_bulk ? MeshMode::rectified : MeshMode::curved_reduced;
}

const char* to_string(ModelVariant variant)
{
    switch (variant) {
    case ModelVariant::full: return "full";
    case ModelVariant::I: return "I";
    case ModelVariant::IR: return "I-R";
    case ModelVariant::II: return "II";
    case ModelVariant::IIR: return "II-R";
    }
    return "?";
}

std::optional<ModelVariant> parse_variant(std::string_view name)
{
    for (ModelVariant v : {ModelVariant::full, ModelVariant::I, ModelVariant::IR, ModelVariant::II, ModelVariant::IIR}) {
        if (name == to_string(v)) {
            return v;
        }
    }
    return std::nullopt;
}

}  // namespace mdfrac
