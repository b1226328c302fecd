#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace bosg {

/// Integer identifier tagged by the kind of thing it names.
template <typename Tag>
struct Id {
  std::uint64_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint64_t v) : value(v) {}

  friend constexpr bool operator==(Id, Id) = default;
  friend constexpr auto operator<=>(Id, Id) = default;
  friend std::ostream& operator<<(std::ostream& os, Id id) { return os << id.value; }
};

using NodeId = Id<struct NodeTag>;
using EdgeId = Id<struct EdgeTag>;
using ObjectId = Id<struct ObjectTag>;

}  // namespace bosg

template <typename Tag>
struct std::hash<bosg::Id<Tag>> {
  std::size_t operator()(bosg::Id<Tag> id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};
