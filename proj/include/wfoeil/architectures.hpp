#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfoeil/formula.hpp"
#include "wfoeil/system.hpp"

namespace wfoeil {

enum class ArchitectureId {
    master_slave,
    star,
    repository,
    pipes_filters,
    blackboard,
    request_response,
    publish_subscribe,
};

const std::vector<ArchitectureId>& all_architectures();
std::string_view architecture_name(ArchitectureId id);
// Accepts the snake_case names and their hyphenated spellings.
std::optional<ArchitectureId> find_architecture(std::string_view name);

struct Architecture {
    ArchitectureId id;
    ParametricSystem system;  // carries the reference instantiation in `instances`
    std::string sentence_text;
    FormulaPtr sentence;
};

// Weight names: a port name (`p_m`), a qualified port (`master.p_m`), or `k_m` for a port `p_m`.
// Values are literals of the chosen semiring; unnamed ports weigh one.
Architecture generate(ArchitectureId id, const std::map<std::string, std::string>& weights = {},
                      std::string_view semiring = "natural");

struct CatalogWord {
    std::string label;
    Word word;
};

// The named example words; `r` must be the reference instantiation.
std::vector<CatalogWord> catalog_words(ArchitectureId id, const InstanceMap& r);

}  // namespace wfoeil
