#pragma once

#include "mdfrac/mesh.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace mdfrac {

enum class ModelVariant { full, I, IR, II, IIR };

/// Which aperture-gradient information a model keeps.
struct VariantFlags {
    bool rectified_bulk = false;
    bool transport_gradients = false;
    bool coupling_gradients = false;
};

/// The single source of truth for the variant table.
VariantFlags flags_of(ModelVariant variant);

/// Bulk mesh mode a variant is posed on.
MeshMode mesh_mode_of(ModelVariant variant);

const char* to_string(ModelVariant variant);
std::optional<ModelVariant> parse_variant(std::string_view name);

}  // namespace mdfrac
