#ifndef RESCAL_GAMES_HPP
#define RESCAL_GAMES_HPP

// Causal-forest semantics on the universal arena.
//
// Moves of the ambient arena are finite lists of naturals, negative at even
// length; larger arenas are reached through tagged tuples, so every address
// translation (fun/unfold/pack/curry) is a concrete rewrite on tags. A
// configuration is a finite forest displayed into an arena; positions are
// configurations up to symmetry and are represented by a canonical
// relabeling, so symmetry checks are structural equality. An augmentation
// layers a second (dynamic) forest over a configuration subject to five
// causal axioms; isogmentations are their canonical forms.
//
// `kappa` translates type terms to positions and back. `encode` translates
// a normal resource expression into an isogmentation over the variables it
// mentions and `decode` inverts it; both factor through the constructor
// algebra (lifting, currying, bags, stream extension) one node per step.
// Event counts come out at exactly twice the number of base subterms.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "rescal/reduce.hpp"
#include "rescal/subst.hpp"
#include "rescal/taylor.hpp"
#include "rescal/term.hpp"
#include "rescal/types.hpp"

namespace rescal {

// ---------------------------------------------------------------------------
// Move addresses
//
// An address is a path (a move of the base arena, possibly empty), a tagged
// pair <tag, sub> (tensor component, arrow side, or stream slot), or a
// named pair <var, sub> (the component of a variable-indexed tensor). The
// atomic output move is represented by the empty path.

class Addr {
 public:
  enum class Kind : uint8_t { List, Pair, Var };

  static Addr list(std::vector<uint32_t> path) {
    Addr a;
    a.kind_ = Kind::List;
    a.path_ = std::move(path);
    return a;
  }
  static Addr pair(uint32_t tag, Addr sub) {
    Addr a;
    a.kind_ = Kind::Pair;
    a.tag_ = tag;
    a.sub_ = std::make_shared<Addr>(std::move(sub));
    return a;
  }
  static Addr var(std::string name, Addr sub) {
    Addr a;
    a.kind_ = Kind::Var;
    a.name_ = std::move(name);
    a.sub_ = std::make_shared<Addr>(std::move(sub));
    return a;
  }

  Kind kind() const { return kind_; }
  const std::vector<uint32_t>& path() const {
    if (kind_ != Kind::List)
      throw std::logic_error("address is not a path");
    return path_;
  }
  uint32_t tag() const {
    if (kind_ != Kind::Pair)
      throw std::logic_error("address is not a tagged pair");
    return tag_;
  }
  const std::string& var_name() const {
    if (kind_ != Kind::Var)
      throw std::logic_error("address is not a named pair");
    return name_;
  }
  const Addr& sub() const {
    if (kind_ == Kind::List)
      throw std::logic_error("a path address has no component");
    return *sub_;
  }

 private:
  Kind kind_ = Kind::List;
  uint32_t tag_ = 0;
  std::string name_;
  std::vector<uint32_t> path_;
  std::shared_ptr<const Addr> sub_;
};

inline int addr_compare(const Addr& a, const Addr& b) {
  if (a.kind() != b.kind())
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case Addr::Kind::List: {
      const auto& p = a.path();
      const auto& q = b.path();
      if (p != q) return p < q ? -1 : 1;
      return 0;
    }
    case Addr::Kind::Pair:
      if (a.tag() != b.tag()) return a.tag() < b.tag() ? -1 : 1;
      return addr_compare(a.sub(), b.sub());
    case Addr::Kind::Var:
      if (a.var_name() != b.var_name())
        return a.var_name() < b.var_name() ? -1 : 1;
      return addr_compare(a.sub(), b.sub());
  }
  return 0;
}

inline bool operator==(const Addr& a, const Addr& b) {
  return addr_compare(a, b) == 0;
}
inline bool operator!=(const Addr& a, const Addr& b) { return !(a == b); }

inline void print_addr(std::ostream& os, const Addr& a) {
  switch (a.kind()) {
    case Addr::Kind::List:
      if (a.path().empty()) {
        os << 'e';
      } else {
        for (size_t i = 0; i < a.path().size(); ++i) {
          if (i) os << '.';
          os << a.path()[i];
        }
      }
      return;
    case Addr::Kind::Pair:
      os << '<' << a.tag() << ", ";
      print_addr(os, a.sub());
      os << '>';
      return;
    case Addr::Kind::Var:
      os << '<' << a.var_name() << ", ";
      print_addr(os, a.sub());
      os << '>';
      return;
  }
}

inline std::string addr_text(const Addr& a) {
  std::ostringstream os;
  print_addr(os, a);
  return os.str();
}

// ---------------------------------------------------------------------------
// Address translations
//
// Each pair below acts the two ways of one arena isomorphism. They are
// partial: an address outside the domain shape raises invalid_argument.

namespace detail {

[[noreturn]] inline void bad_addr(const char* iso, const Addr& a) {
  throw std::invalid_argument(std::string(iso) +
                              ": malformed address " + addr_text(a));
}

}  // namespace detail

// Base arena as its own arrow: e <-> <2, e>, 0::n <-> <1, n>,
// (i+1)::n <-> <2, i::n>.
inline Addr fun_addr(const Addr& a) {
  if (a.kind() != Addr::Kind::List) detail::bad_addr("fun_addr", a);
  const auto& p = a.path();
  if (p.empty()) return Addr::pair(2, Addr::list({}));
  std::vector<uint32_t> rest(p.begin() + 1, p.end());
  if (p.front() == 0) return Addr::pair(1, Addr::list(std::move(rest)));
  std::vector<uint32_t> shifted;
  shifted.reserve(p.size());
  shifted.push_back(p.front() - 1);
  shifted.insert(shifted.end(), rest.begin(), rest.end());
  return Addr::pair(2, Addr::list(std::move(shifted)));
}

inline Addr unfun_addr(const Addr& a) {
  if (a.kind() != Addr::Kind::Pair || a.sub().kind() != Addr::Kind::List)
    detail::bad_addr("unfun_addr", a);
  const auto& p = a.sub().path();
  if (a.tag() == 1) {
    std::vector<uint32_t> out;
    out.reserve(p.size() + 1);
    out.push_back(0);
    out.insert(out.end(), p.begin(), p.end());
    return Addr::list(std::move(out));
  }
  if (a.tag() != 2) detail::bad_addr("unfun_addr", a);
  if (p.empty()) return Addr::list({});
  std::vector<uint32_t> out(p);
  out.front() += 1;
  return Addr::list(std::move(out));
}

// Base arena as an arrow over the stream arena: e <-> <2, e>,
// i::n <-> <1, <i, n>>.
inline Addr unfold_addr(const Addr& a) {
  if (a.kind() != Addr::Kind::List) detail::bad_addr("unfold_addr", a);
  const auto& p = a.path();
  if (p.empty()) return Addr::pair(2, Addr::list({}));
  std::vector<uint32_t> rest(p.begin() + 1, p.end());
  return Addr::pair(1, Addr::pair(p.front(), Addr::list(std::move(rest))));
}

inline Addr fold_addr(const Addr& a) {
  if (a.kind() != Addr::Kind::Pair) detail::bad_addr("fold_addr", a);
  if (a.tag() == 2) {
    if (a.sub().kind() != Addr::Kind::List || !a.sub().path().empty())
      detail::bad_addr("fold_addr", a);
    return Addr::list({});
  }
  if (a.tag() != 1 || a.sub().kind() != Addr::Kind::Pair ||
      a.sub().sub().kind() != Addr::Kind::List)
    detail::bad_addr("fold_addr", a);
  std::vector<uint32_t> out;
  out.reserve(a.sub().sub().path().size() + 1);
  out.push_back(a.sub().tag());
  const auto& rest = a.sub().sub().path();
  out.insert(out.end(), rest.begin(), rest.end());
  return Addr::list(std::move(out));
}

// One component in front of a stream of components: <1, a> <-> <0, a>,
// <2, <i, a>> <-> <i+1, a>.
inline Addr pack_addr(const Addr& a) {
  if (a.kind() != Addr::Kind::Pair) detail::bad_addr("pack_addr", a);
  if (a.tag() == 1) return Addr::pair(0, a.sub());
  if (a.tag() != 2 || a.sub().kind() != Addr::Kind::Pair)
    detail::bad_addr("pack_addr", a);
  return Addr::pair(a.sub().tag() + 1, a.sub().sub());
}

inline Addr unpack_addr(const Addr& a) {
  if (a.kind() != Addr::Kind::Pair) detail::bad_addr("unpack_addr", a);
  if (a.tag() == 0) return Addr::pair(1, a.sub());
  return Addr::pair(2, Addr::pair(a.tag() - 1, a.sub()));
}

// Rebracketing of a two-part context in front of an arrow:
// <1, <1, g>> <-> <1, g>, <1, <2, a>> <-> <2, <1, a>>, <2, b> <-> <2, <2, b>>.
inline Addr curry_addr(const Addr& a) {
  if (a.kind() != Addr::Kind::Pair) detail::bad_addr("curry_addr", a);
  if (a.tag() == 1) {
    if (a.sub().kind() != Addr::Kind::Pair) detail::bad_addr("curry_addr", a);
    if (a.sub().tag() == 1) return Addr::pair(1, a.sub().sub());
    if (a.sub().tag() == 2)
      return Addr::pair(2, Addr::pair(1, a.sub().sub()));
    detail::bad_addr("curry_addr", a);
  }
  if (a.tag() != 2) detail::bad_addr("curry_addr", a);
  return Addr::pair(2, Addr::pair(2, a.sub()));
}

inline Addr uncurry_addr(const Addr& a) {
  if (a.kind() != Addr::Kind::Pair) detail::bad_addr("uncurry_addr", a);
  if (a.tag() == 1) return Addr::pair(1, Addr::pair(1, a.sub()));
  if (a.tag() != 2 || a.sub().kind() != Addr::Kind::Pair)
    detail::bad_addr("uncurry_addr", a);
  if (a.sub().tag() == 1) return Addr::pair(1, Addr::pair(2, a.sub().sub()));
  if (a.sub().tag() == 2) return Addr::pair(2, a.sub().sub());
  detail::bad_addr("uncurry_addr", a);
}

// ---------------------------------------------------------------------------
// The arenas in play
//
// Everything below happens on six arena shapes: the base arena, its stream
// of copies, and judgement arenas whose left side indexes stream arenas by
// variable names while the right side is the atomic output, the base arena,
// the stream arena, or a base/stream pair (the intermediate step of stream
// extension).

enum class ArenaTag : uint8_t {
  universal,         // addresses are bare paths
  universal_stream,  // addresses are <component, path>
  hom_ground,        // <1, <var, <comp, path>>> or <2, e>
  hom_value,         // <1, <var, <comp, path>>> or <2, path>
  hom_stream,        // <1, <var, <comp, path>>> or <2, <comp, path>>
  hom_pair,          // right side <2, <1, path>> or <2, <2, <comp, path>>>
};

inline bool arena_is_hom(ArenaTag t) {
  return t == ArenaTag::hom_ground || t == ArenaTag::hom_value ||
         t == ArenaTag::hom_stream || t == ArenaTag::hom_pair;
}

inline Addr left_addr(const std::string& var, uint32_t comp,
                      std::vector<uint32_t> path) {
  return Addr::pair(
      1, Addr::var(var, Addr::pair(comp, Addr::list(std::move(path)))));
}
inline Addr right_ground_addr() { return Addr::pair(2, Addr::list({})); }
inline Addr right_value_addr(std::vector<uint32_t> path) {
  return Addr::pair(2, Addr::list(std::move(path)));
}
inline Addr right_stream_addr(uint32_t comp, std::vector<uint32_t> path) {
  return Addr::pair(2, Addr::pair(comp, Addr::list(std::move(path))));
}

namespace detail {

inline bool left_shape(const Addr& a) {
  return a.kind() == Addr::Kind::Pair && a.tag() == 1 &&
         a.sub().kind() == Addr::Kind::Var &&
         a.sub().sub().kind() == Addr::Kind::Pair &&
         a.sub().sub().sub().kind() == Addr::Kind::List;
}

inline bool stream_shape(const Addr& a) {
  return a.kind() == Addr::Kind::Pair &&
         a.sub().kind() == Addr::Kind::List;
}

// The innermost path of a well-formed display address.
inline const std::vector<uint32_t>& inner_path(const Addr& a) {
  const Addr* cur = &a;
  while (cur->kind() != Addr::Kind::List) cur = &cur->sub();
  return cur->path();
}

inline Addr with_inner_path(const Addr& a, std::vector<uint32_t> path) {
  switch (a.kind()) {
    case Addr::Kind::List:
      return Addr::list(std::move(path));
    case Addr::Kind::Pair:
      return Addr::pair(a.tag(), with_inner_path(a.sub(), std::move(path)));
    case Addr::Kind::Var:
      return Addr::var(a.var_name(),
                       with_inner_path(a.sub(), std::move(path)));
  }
  throw std::logic_error("unreachable address kind");
}

}  // namespace detail

inline bool addr_on_left(const Addr& a) {
  return a.kind() == Addr::Kind::Pair && a.tag() == 1;
}

inline bool addr_wellformed(ArenaTag t, const Addr& a) {
  switch (t) {
    case ArenaTag::universal:
      return a.kind() == Addr::Kind::List;
    case ArenaTag::universal_stream:
      return detail::stream_shape(a);
    case ArenaTag::hom_ground:
    case ArenaTag::hom_value:
    case ArenaTag::hom_stream:
    case ArenaTag::hom_pair:
      break;
  }
  if (a.kind() != Addr::Kind::Pair) return false;
  if (a.tag() == 1) return detail::left_shape(a);
  if (a.tag() != 2) return false;
  const Addr& r = a.sub();
  switch (t) {
    case ArenaTag::hom_ground:
      return r.kind() == Addr::Kind::List && r.path().empty();
    case ArenaTag::hom_value:
      return r.kind() == Addr::Kind::List;
    case ArenaTag::hom_stream:
      return detail::stream_shape(r);
    case ArenaTag::hom_pair:
      if (r.kind() != Addr::Kind::Pair) return false;
      if (r.tag() == 1) return r.sub().kind() == Addr::Kind::List;
      return r.tag() == 2 && detail::stream_shape(r.sub());
    default:
      return false;
  }
}

inline bool addr_minimal(ArenaTag t, const Addr& a) {
  if (!addr_wellformed(t, a))
    throw std::invalid_argument("address does not belong to the arena: " +
                                addr_text(a));
  return detail::inner_path(a).empty();
}

// The unique arena move enabling a non-minimal address.
inline Addr addr_parent(ArenaTag t, const Addr& a) {
  if (addr_minimal(t, a))
    throw std::invalid_argument("a minimal address has no parent: " +
                                addr_text(a));
  std::vector<uint32_t> p = detail::inner_path(a);
  p.pop_back();
  return detail::with_inner_path(a, std::move(p));
}

inline bool addr_negative(ArenaTag t, const Addr& a) {
  if (!addr_wellformed(t, a))
    throw std::invalid_argument("address does not belong to the arena: " +
                                addr_text(a));
  bool even = detail::inner_path(a).size() % 2 == 0;
  return addr_on_left(a) && arena_is_hom(t) ? !even : even;
}

// ---------------------------------------------------------------------------
// Configurations

// A finite forest displayed into an arena. Events are 0..n-1; parent -1
// marks a root. Roots must sit on arena-minimal addresses, and every edge
// must display to an immediate arena dependency.
struct Configuration {
  ArenaTag arena = ArenaTag::universal;
  std::vector<int> parent;
  std::vector<Addr> display;
};

inline size_t config_size(const Configuration& c) { return c.display.size(); }

namespace detail {

inline std::optional<std::string> forest_issue(const std::vector<int>& parent,
                                               const char* which) {
  int n = static_cast<int>(parent.size());
  for (int i = 0; i < n; ++i) {
    if (parent[i] < -1 || parent[i] >= n || parent[i] == i)
      return std::string(which) + " parent of event " + std::to_string(i) +
             " is out of range";
    int cur = i;
    for (int steps = 0; cur != -1; ++steps) {
      if (steps > n)
        return std::string(which) + " parent pointers form a cycle at event " +
               std::to_string(i);
      cur = parent[cur];
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline std::optional<std::string> configuration_issue(
    const Configuration& c) {
  if (c.parent.size() != c.display.size())
    return "event and display counts differ";
  if (auto e = detail::forest_issue(c.parent, "static")) return e;
  int n = static_cast<int>(c.display.size());
  for (int i = 0; i < n; ++i) {
    if (!addr_wellformed(c.arena, c.display[i]))
      return "display of event " + std::to_string(i) +
             " does not belong to the arena: " + addr_text(c.display[i]);
    bool min = addr_minimal(c.arena, c.display[i]);
    if ((c.parent[i] == -1) != min)
      return "event " + std::to_string(i) +
             (min ? " has a parent but displays to an arena root"
                  : " is a root but displays to a non-minimal address");
    if (c.parent[i] != -1 &&
        c.display[c.parent[i]] != addr_parent(c.arena, c.display[i]))
      return "edge into event " + std::to_string(i) +
             " does not display to an arena dependency";
  }
  return std::nullopt;
}

inline void validate_configuration(const Configuration& c) {
  if (auto e = configuration_issue(c)) throw std::invalid_argument(*e);
}

// ---------------------------------------------------------------------------
// Positions: configurations up to symmetry
//
// The canonical representative renumbers events in preorder, with siblings
// ordered by a key that spells out the whole labeled subtree. A symmetry
// preserves displays and forest structure, so two configurations are
// symmetric exactly when their canonical forms coincide.

struct Position {
  Configuration config;
};

namespace detail {

inline std::string addr_key(const Addr& a) {
  switch (a.kind()) {
    case Addr::Kind::List: {
      std::string out = "L[";
      for (uint32_t x : a.path()) {
        out += std::to_string(x);
        out += '.';
      }
      out += ']';
      return out;
    }
    case Addr::Kind::Pair:
      return "P" + std::to_string(a.tag()) + "(" + addr_key(a.sub()) + ")";
    case Addr::Kind::Var:
      return "N(" + a.var_name() + ")(" + addr_key(a.sub()) + ")";
  }
  throw std::logic_error("unreachable address kind");
}

inline std::vector<std::vector<int>> children_of(
    const std::vector<int>& parent) {
  std::vector<std::vector<int>> kids(parent.size());
  for (size_t i = 0; i < parent.size(); ++i)
    if (parent[i] != -1) kids[parent[i]].push_back(static_cast<int>(i));
  return kids;
}

template <class Label>
std::string canon_key(int e, const std::vector<std::vector<int>>& kids,
                      const Label& label) {
  std::vector<std::string> sub;
  sub.reserve(kids[e].size());
  for (int c : kids[e]) sub.push_back(canon_key(c, kids, label));
  std::sort(sub.begin(), sub.end());
  std::string out = label(e);
  out += '(';
  for (const auto& s : sub) out += s;
  out += ')';
  return out;
}

// Renumbers a labeled forest into its canonical preorder. Returns the map
// from old to new indices in `order` (new index of old event i).
template <class Label>
std::vector<int> canon_order(const std::vector<int>& parent,
                             const Label& label) {
  auto kids = children_of(parent);
  size_t n = parent.size();
  std::vector<std::string> key(n);
  for (size_t i = 0; i < n; ++i)
    key[i] = canon_key(static_cast<int>(i), kids, label);
  auto by_key = [&](int a, int b) { return key[a] < key[b]; };
  std::vector<int> roots;
  for (size_t i = 0; i < n; ++i)
    if (parent[i] == -1) roots.push_back(static_cast<int>(i));
  std::sort(roots.begin(), roots.end(), by_key);
  std::vector<int> order(n, -1);
  int next = 0;
  std::vector<int> stack;
  for (size_t r = roots.size(); r-- > 0;) stack.push_back(roots[r]);
  while (!stack.empty()) {
    int e = stack.back();
    stack.pop_back();
    order[e] = next++;
    std::vector<int> cs = kids[e];
    std::sort(cs.begin(), cs.end(), by_key);
    for (size_t c = cs.size(); c-- > 0;) stack.push_back(cs[c]);
  }
  return order;
}

}  // namespace detail

inline Position canonicalize_position(const Configuration& c) {
  validate_configuration(c);
  std::vector<int> order = detail::canon_order(
      c.parent, [&](int e) { return detail::addr_key(c.display[e]); });
  size_t n = c.display.size();
  Configuration out;
  out.arena = c.arena;
  out.parent.assign(n, -1);
  out.display.assign(n, Addr::list({}));
  for (size_t i = 0; i < n; ++i) {
    out.parent[order[i]] = c.parent[i] == -1 ? -1 : order[c.parent[i]];
    out.display[order[i]] = c.display[i];
  }
  return Position{std::move(out)};
}

inline int position_compare(const Position& a, const Position& b) {
  if (a.config.arena != b.config.arena)
    return a.config.arena < b.config.arena ? -1 : 1;
  if (a.config.parent != b.config.parent)
    return a.config.parent < b.config.parent ? -1 : 1;
  size_t n = std::min(a.config.display.size(), b.config.display.size());
  for (size_t i = 0; i < n; ++i)
    if (int c = addr_compare(a.config.display[i], b.config.display[i]))
      return c;
  if (a.config.display.size() != b.config.display.size())
    return a.config.display.size() < b.config.display.size() ? -1 : 1;
  return 0;
}

inline bool operator==(const Position& a, const Position& b) {
  return position_compare(a, b) == 0;
}
inline bool operator!=(const Position& a, const Position& b) {
  return !(a == b);
}

inline Position empty_position(ArenaTag t) {
  return Position{Configuration{t, {}, {}}};
}

inline size_t position_size(const Position& p) {
  return p.config.display.size();
}

inline bool position_pointed(const Position& p) {
  int roots = 0;
  for (int par : p.config.parent)
    if (par == -1) ++roots;
  return roots == 1;
}

// Range of a position on the stream arena: one past the largest inhabited
// component.
inline uint32_t position_range(const Position& p) {
  if (p.config.arena != ArenaTag::universal_stream)
    throw std::invalid_argument("range requires a stream-arena position");
  uint32_t r = 0;
  for (const auto& a : p.config.display) r = std::max(r, a.tag() + 1);
  return r;
}

// ---------------------------------------------------------------------------
// Position constructors

// x => o followed by folding back to the base arena: a fresh root under
// which the whole stream-arena position hangs, component i becoming the
// path prefix i.
inline Position pos_arrow(const Position& x) {
  if (x.config.arena != ArenaTag::universal_stream)
    throw std::invalid_argument("pos_arrow expects a stream-arena position");
  size_t n = x.config.display.size();
  Configuration out;
  out.arena = ArenaTag::universal;
  out.parent.assign(n + 1, -1);
  out.display.assign(n + 1, Addr::list({}));
  for (size_t i = 0; i < n; ++i) {
    const Addr& d = x.config.display[i];
    std::vector<uint32_t> path;
    path.reserve(d.sub().path().size() + 1);
    path.push_back(d.tag());
    path.insert(path.end(), d.sub().path().begin(), d.sub().path().end());
    out.display[i + 1] = Addr::list(std::move(path));
    out.parent[i + 1] =
        x.config.parent[i] == -1 ? 0 : x.config.parent[i] + 1;
  }
  return canonicalize_position(out);
}

inline Position pos_unarrow(const Position& p) {
  validate_configuration(p.config);
  if (p.config.arena != ArenaTag::universal || !position_pointed(p))
    throw std::invalid_argument(
        "pos_unarrow expects a pointed base-arena position");
  size_t n = p.config.display.size();
  int root = -1;
  for (size_t i = 0; i < n; ++i)
    if (p.config.parent[i] == -1) root = static_cast<int>(i);
  Configuration out;
  out.arena = ArenaTag::universal_stream;
  std::vector<int> remap(n, -1);
  for (size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) == root) continue;
    remap[i] = static_cast<int>(out.display.size());
    const auto& path = p.config.display[i].path();
    std::vector<uint32_t> rest(path.begin() + 1, path.end());
    out.display.push_back(
        Addr::pair(path.front(), Addr::list(std::move(rest))));
    out.parent.push_back(-1);
  }
  for (size_t i = 0; i < n; ++i) {
    if (remap[i] == -1) continue;
    int par = p.config.parent[i];
    out.parent[remap[i]] = par == root ? -1 : remap[par];
  }
  return canonicalize_position(out);
}

// Extends a stream-arena position with a base-arena position in component
// 0, shifting the existing components up.
inline Position pos_cons(const Position& x, const Position& y) {
  if (x.config.arena != ArenaTag::universal ||
      y.config.arena != ArenaTag::universal_stream)
    throw std::invalid_argument(
        "pos_cons expects a base-arena and a stream-arena position");
  Configuration out;
  out.arena = ArenaTag::universal_stream;
  size_t nx = x.config.display.size();
  for (size_t i = 0; i < nx; ++i) {
    out.parent.push_back(x.config.parent[i]);
    out.display.push_back(Addr::pair(0, x.config.display[i]));
  }
  for (size_t i = 0; i < y.config.display.size(); ++i) {
    int par = y.config.parent[i];
    out.parent.push_back(par == -1 ? -1 : par + static_cast<int>(nx));
    const Addr& d = y.config.display[i];
    out.display.push_back(Addr::pair(d.tag() + 1, d.sub()));
  }
  return canonicalize_position(out);
}

inline std::pair<Position, Position> pos_uncons(const Position& z) {
  if (z.config.arena != ArenaTag::universal_stream)
    throw std::invalid_argument("pos_uncons expects a stream-arena position");
  Configuration head, tail;
  head.arena = ArenaTag::universal;
  tail.arena = ArenaTag::universal_stream;
  size_t n = z.config.display.size();
  std::vector<int> remap(n, -1);
  for (size_t i = 0; i < n; ++i) {
    const Addr& d = z.config.display[i];
    if (d.tag() == 0) {
      remap[i] = static_cast<int>(head.display.size());
      head.display.push_back(d.sub());
      head.parent.push_back(0);
    } else {
      remap[i] = static_cast<int>(tail.display.size());
      tail.display.push_back(Addr::pair(d.tag() - 1, d.sub()));
      tail.parent.push_back(0);
    }
  }
  for (size_t i = 0; i < n; ++i) {
    int par = z.config.parent[i];
    int mapped = par == -1 ? -1 : remap[par];
    if (z.config.display[i].tag() == 0)
      head.parent[remap[i]] = mapped;
    else
      tail.parent[remap[i]] = mapped;
  }
  return {canonicalize_position(head), canonicalize_position(tail)};
}

// Disjoint union of pointed base-arena positions.
inline Position pos_bag(const std::vector<Position>& xs) {
  Configuration out;
  out.arena = ArenaTag::universal;
  for (const auto& x : xs) {
    if (x.config.arena != ArenaTag::universal || !position_pointed(x))
      throw std::invalid_argument(
          "pos_bag expects pointed base-arena positions");
    int offset = static_cast<int>(out.display.size());
    for (size_t i = 0; i < x.config.display.size(); ++i) {
      int par = x.config.parent[i];
      out.parent.push_back(par == -1 ? -1 : par + offset);
      out.display.push_back(x.config.display[i]);
    }
  }
  return canonicalize_position(out);
}

inline std::vector<Position> pos_unbag(const Position& x) {
  if (x.config.arena != ArenaTag::universal)
    throw std::invalid_argument("pos_unbag expects a base-arena position");
  size_t n = x.config.display.size();
  std::vector<int> tree(n, -1);
  for (size_t i = 0; i < n; ++i) {
    size_t cur = i;
    while (x.config.parent[cur] != -1)
      cur = static_cast<size_t>(x.config.parent[cur]);
    tree[i] = static_cast<int>(cur);
  }
  std::map<int, Configuration> parts;
  std::vector<int> remap(n, -1);
  for (size_t i = 0; i < n; ++i) {
    Configuration& part = parts
                              .emplace(tree[i], Configuration{
                                                    ArenaTag::universal,
                                                    {},
                                                    {}})
                              .first->second;
    remap[i] = static_cast<int>(part.display.size());
    part.display.push_back(x.config.display[i]);
    part.parent.push_back(-1);
  }
  for (size_t i = 0; i < n; ++i) {
    int par = x.config.parent[i];
    if (par != -1) parts.at(tree[i]).parent[remap[i]] = remap[par];
  }
  std::vector<Position> out;
  out.reserve(parts.size());
  for (auto& [root, part] : parts)
    out.push_back(canonicalize_position(part));
  std::sort(out.begin(), out.end(), [](const Position& a, const Position& b) {
    return position_compare(a, b) < 0;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Type terms as positions

enum class TypeSort : uint8_t { value, bag, stream };

inline Position kappa_value(const ValueType& a);
inline Position kappa_bag(const BagType& b);
inline Position kappa_stream(const StreamType& s);

inline Position kappa_value(const ValueType& a) {
  return pos_arrow(kappa_stream(a.arg));
}

inline Position kappa_bag(const BagType& b) {
  std::vector<Position> parts;
  parts.reserve(b.elems.size());
  for (const auto& e : b.elems) parts.push_back(kappa_value(e));
  return pos_bag(parts);
}

inline Position kappa_stream(const StreamType& s) {
  Position acc = empty_position(ArenaTag::universal_stream);
  for (size_t i = s.bags.size(); i-- > 0;)
    acc = pos_cons(kappa_bag(s.bags[i]), acc);
  return acc;
}

inline Position kappa(const TypeTerm& t) {
  if (std::holds_alternative<ValueType>(t))
    return kappa_value(std::get<ValueType>(t));
  if (std::holds_alternative<BagType>(t))
    return kappa_bag(std::get<BagType>(t));
  if (std::holds_alternative<StreamType>(t))
    return kappa_stream(std::get<StreamType>(t));
  throw std::invalid_argument(
      "kappa expects a value, bag, or stream type");
}

inline TypeTerm kappa_inv(const Position& p, TypeSort sort) {
  switch (sort) {
    case TypeSort::value:
      return ValueType{
          std::get<StreamType>(kappa_inv(pos_unarrow(p), TypeSort::stream))};
    case TypeSort::bag: {
      std::vector<ValueType> elems;
      for (const auto& part : pos_unbag(p))
        elems.push_back(
            std::get<ValueType>(kappa_inv(part, TypeSort::value)));
      return mk_bag_type(std::move(elems));
    }
    case TypeSort::stream: {
      if (p.config.arena != ArenaTag::universal_stream)
        throw std::invalid_argument(
            "kappa_inv expects a stream-arena position");
      if (position_size(p) == 0) return iota_type();
      auto [head, tail] = pos_uncons(p);
      return cons_type(
          std::get<BagType>(kappa_inv(head, TypeSort::bag)),
          std::get<StreamType>(kappa_inv(tail, TypeSort::stream)));
    }
  }
  throw std::logic_error("unreachable type sort");
}

// ---------------------------------------------------------------------------
// Augmentations
//
// A configuration (the static order) equipped with a second forest (the
// dynamic order) over the same displayed events, subject to:
//   rule-abiding    every static dependency is a dynamic one,
//   courteous       a dynamic edge out of a positive event or into a
//                   negative one is already static,
//   deterministic   a negative event has at most one positive child,
//   plus-covered    dynamically maximal events are positive,
//   negative        dynamically minimal events are negative.

struct Augmentation {
  ArenaTag arena = ArenaTag::hom_ground;
  std::vector<int> dynamic_parent;
  std::vector<int> static_parent;
  std::vector<Addr> display;
};

inline size_t aug_size(const Augmentation& q) { return q.display.size(); }

inline bool aug_pointed(const Augmentation& q) {
  int roots = 0;
  for (int par : q.dynamic_parent)
    if (par == -1) ++roots;
  return roots == 1;
}

inline Configuration desequentialization(const Augmentation& q) {
  return Configuration{q.arena, q.static_parent, q.display};
}

inline uint32_t aug_range(const Augmentation& q) {
  if (q.arena != ArenaTag::hom_stream)
    throw std::invalid_argument(
        "range requires an augmentation with a stream output");
  uint32_t r = 0;
  for (const auto& a : q.display)
    if (!addr_on_left(a)) r = std::max(r, a.sub().tag() + 1);
  return r;
}

inline std::optional<std::string> augmentation_issue(const Augmentation& q) {
  if (!arena_is_hom(q.arena))
    return "augmentations live on judgement arenas";
  if (q.dynamic_parent.size() != q.display.size() ||
      q.static_parent.size() != q.display.size())
    return "event, display, and order counts differ";
  if (auto e = configuration_issue(desequentialization(q)))
    return "static order: " + *e;
  if (auto e = detail::forest_issue(q.dynamic_parent, "dynamic")) return e;
  int n = static_cast<int>(q.display.size());
  std::vector<bool> neg(n);
  for (int i = 0; i < n; ++i) neg[i] = addr_negative(q.arena, q.display[i]);
  std::vector<bool> has_child(n, false);
  std::vector<int> positive_children(n, 0);
  for (int i = 0; i < n; ++i) {
    int sp = q.static_parent[i];
    if (sp != -1) {
      int cur = q.dynamic_parent[i];
      while (cur != -1 && cur != sp) cur = q.dynamic_parent[cur];
      if (cur != sp)
        return "not rule-abiding: the static parent of event " +
               std::to_string(i) + " is not a dynamic ancestor";
    }
    int dp = q.dynamic_parent[i];
    if (dp != -1) {
      has_child[dp] = true;
      if (!neg[i]) ++positive_children[dp];
      if ((!neg[dp] || neg[i]) && sp != dp)
        return "not courteous: the dynamic edge into event " +
               std::to_string(i) + " is not static";
    } else if (!neg[i]) {
      return "not negative: event " + std::to_string(i) +
             " is a dynamic root with positive polarity";
    }
  }
  for (int i = 0; i < n; ++i) {
    if (neg[i] && positive_children[i] > 1)
      return "not deterministic: event " + std::to_string(i) +
             " has two positive dynamic children";
    if (!has_child[i] && neg[i])
      return "not plus-covered: event " + std::to_string(i) +
             " is dynamically maximal with negative polarity";
  }
  return std::nullopt;
}

inline void validate_augmentation(const Augmentation& q) {
  if (auto e = augmentation_issue(q)) throw std::invalid_argument(*e);
}

// ---------------------------------------------------------------------------
// Isogmentations: augmentations up to isomorphism
//
// The canonical form renumbers the dynamic forest in preorder. The static
// parent of an event is always one of its dynamic ancestors, so it is
// recorded inside the sibling sort key as the number of dynamic steps
// between them; two augmentations get the same canonical form exactly when
// some bijection preserves displays and both orders.

struct Isogmentation {
  Augmentation aug;
};

inline Isogmentation canonicalize_augmentation(const Augmentation& q) {
  validate_augmentation(q);
  auto label = [&](int e) {
    int depth = -1;
    if (q.static_parent[e] != -1) {
      depth = 0;
      int cur = e;
      while (cur != q.static_parent[e]) {
        cur = q.dynamic_parent[cur];
        ++depth;
      }
    }
    return detail::addr_key(q.display[e]) + "|" + std::to_string(depth);
  };
  std::vector<int> order = detail::canon_order(q.dynamic_parent, label);
  size_t n = q.display.size();
  Augmentation out;
  out.arena = q.arena;
  out.dynamic_parent.assign(n, -1);
  out.static_parent.assign(n, -1);
  out.display.assign(n, Addr::list({}));
  for (size_t i = 0; i < n; ++i) {
    int e = order[i];
    out.dynamic_parent[e] =
        q.dynamic_parent[i] == -1 ? -1 : order[q.dynamic_parent[i]];
    out.static_parent[e] =
        q.static_parent[i] == -1 ? -1 : order[q.static_parent[i]];
    out.display[e] = q.display[i];
  }
  return Isogmentation{std::move(out)};
}

inline int isog_compare(const Isogmentation& a, const Isogmentation& b) {
  if (a.aug.arena != b.aug.arena) return a.aug.arena < b.aug.arena ? -1 : 1;
  if (a.aug.dynamic_parent != b.aug.dynamic_parent)
    return a.aug.dynamic_parent < b.aug.dynamic_parent ? -1 : 1;
  if (a.aug.static_parent != b.aug.static_parent)
    return a.aug.static_parent < b.aug.static_parent ? -1 : 1;
  size_t n = std::min(a.aug.display.size(), b.aug.display.size());
  for (size_t i = 0; i < n; ++i)
    if (int c = addr_compare(a.aug.display[i], b.aug.display[i])) return c;
  if (a.aug.display.size() != b.aug.display.size())
    return a.aug.display.size() < b.aug.display.size() ? -1 : 1;
  return 0;
}

inline bool operator==(const Isogmentation& a, const Isogmentation& b) {
  return isog_compare(a, b) == 0;
}
inline bool operator!=(const Isogmentation& a, const Isogmentation& b) {
  return !(a == b);
}

inline Isogmentation empty_isog(ArenaTag t) {
  if (!arena_is_hom(t))
    throw std::invalid_argument("augmentations live on judgement arenas");
  return Isogmentation{Augmentation{t, {}, {}, {}}};
}

inline size_t isog_size(const Isogmentation& q) { return aug_size(q.aug); }

// Variable names appearing on the left side of the displays.
inline std::set<std::string> display_support(const Augmentation& q) {
  std::set<std::string> out;
  for (const auto& a : q.display)
    if (addr_on_left(a)) out.insert(a.sub().var_name());
  return out;
}

// ---------------------------------------------------------------------------
// Constructors on isogmentations

// Pairs a base-output augmentation with a stream-output one over a shared
// left side: right displays gain the pairing tag, orders are inherited.
inline Isogmentation aug_tupling(const Isogmentation& p,
                                 const Isogmentation& q) {
  if (p.aug.arena != ArenaTag::hom_value ||
      q.aug.arena != ArenaTag::hom_stream)
    throw std::invalid_argument(
        "aug_tupling expects a base-output and a stream-output augmentation");
  Augmentation out;
  out.arena = ArenaTag::hom_pair;
  auto push = [&](const Augmentation& src, uint32_t slot, int offset) {
    for (size_t i = 0; i < src.display.size(); ++i) {
      int dp = src.dynamic_parent[i];
      int sp = src.static_parent[i];
      out.dynamic_parent.push_back(dp == -1 ? -1 : dp + offset);
      out.static_parent.push_back(sp == -1 ? -1 : sp + offset);
      const Addr& d = src.display[i];
      out.display.push_back(
          addr_on_left(d) ? d : Addr::pair(2, Addr::pair(slot, d.sub())));
    }
  };
  push(p.aug, 1, 0);
  push(q.aug, 2, static_cast<int>(p.aug.display.size()));
  return canonicalize_augmentation(out);
}

// Collapses the pairing tag into stream components: slot 1 becomes
// component 0 and slot 2 shifts up, exactly the pack translation on the
// right side of each display.
inline Isogmentation aug_pack(const Isogmentation& q) {
  if (q.aug.arena != ArenaTag::hom_pair)
    throw std::invalid_argument(
        "aug_pack expects a pair-output augmentation");
  Augmentation out = q.aug;
  out.arena = ArenaTag::hom_stream;
  for (auto& a : out.display)
    if (!addr_on_left(a)) a = Addr::pair(2, pack_addr(a.sub()));
  return canonicalize_augmentation(out);
}

inline Isogmentation aug_cons(const Isogmentation& p,
                              const Isogmentation& q) {
  return aug_pack(aug_tupling(p, q));
}

inline std::pair<Isogmentation, Isogmentation> aug_uncons(
    const Isogmentation& z) {
  if (z.aug.arena != ArenaTag::hom_stream)
    throw std::invalid_argument(
        "aug_uncons expects a stream-output augmentation");
  size_t n = z.aug.display.size();
  // Every dynamic tree belongs to the stream component its root displays
  // into; left-displayed events ride with their tree.
  std::vector<int> root(n, -1);
  for (size_t i = 0; i < n; ++i) {
    size_t cur = i;
    while (z.aug.dynamic_parent[cur] != -1)
      cur = static_cast<size_t>(z.aug.dynamic_parent[cur]);
    root[i] = static_cast<int>(cur);
  }
  Augmentation head, tail;
  head.arena = ArenaTag::hom_value;
  tail.arena = ArenaTag::hom_stream;
  std::vector<int> remap(n, -1);
  std::vector<bool> to_head(n, false);
  for (size_t i = 0; i < n; ++i) {
    const Addr& rd = z.aug.display[root[i]];
    if (addr_on_left(rd))
      throw std::invalid_argument(
          "aug_uncons: a dynamic root displays into the left side");
    to_head[i] = rd.sub().tag() == 0;
    Augmentation& part = to_head[i] ? head : tail;
    remap[i] = static_cast<int>(part.display.size());
    const Addr& d = z.aug.display[i];
    if (addr_on_left(d)) {
      part.display.push_back(d);
    } else if (to_head[i]) {
      part.display.push_back(Addr::pair(2, unpack_addr(d.sub()).sub()));
    } else {
      part.display.push_back(
          Addr::pair(2, Addr::pair(d.sub().tag() - 1, d.sub().sub())));
    }
    part.dynamic_parent.push_back(-1);
    part.static_parent.push_back(-1);
  }
  for (size_t i = 0; i < n; ++i) {
    Augmentation& part = to_head[i] ? head : tail;
    int dp = z.aug.dynamic_parent[i];
    int sp = z.aug.static_parent[i];
    part.dynamic_parent[remap[i]] = dp == -1 ? -1 : remap[dp];
    part.static_parent[remap[i]] = sp == -1 ? -1 : remap[sp];
  }
  return {canonicalize_augmentation(head), canonicalize_augmentation(tail)};
}

// Disjoint union of pointed base-output augmentations; the empty family
// gives the neutral empty isogmentation.
inline Isogmentation aug_bag(const std::vector<Isogmentation>& parts) {
  Augmentation out;
  out.arena = ArenaTag::hom_value;
  for (const auto& p : parts) {
    if (p.aug.arena != ArenaTag::hom_value || !aug_pointed(p.aug))
      throw std::invalid_argument(
          "aug_bag expects pointed base-output augmentations");
    int offset = static_cast<int>(out.display.size());
    for (size_t i = 0; i < p.aug.display.size(); ++i) {
      int dp = p.aug.dynamic_parent[i];
      int sp = p.aug.static_parent[i];
      out.dynamic_parent.push_back(dp == -1 ? -1 : dp + offset);
      out.static_parent.push_back(sp == -1 ? -1 : sp + offset);
      out.display.push_back(p.aug.display[i]);
    }
  }
  return canonicalize_augmentation(out);
}

inline std::vector<Isogmentation> aug_unbag(const Isogmentation& q) {
  if (q.aug.arena != ArenaTag::hom_value)
    throw std::invalid_argument(
        "aug_unbag expects a base-output augmentation");
  size_t n = q.aug.display.size();
  std::vector<int> root(n, -1);
  for (size_t i = 0; i < n; ++i) {
    size_t cur = i;
    while (q.aug.dynamic_parent[cur] != -1)
      cur = static_cast<size_t>(q.aug.dynamic_parent[cur]);
    root[i] = static_cast<int>(cur);
  }
  std::map<int, Augmentation> parts;
  std::vector<int> remap(n, -1);
  for (size_t i = 0; i < n; ++i) {
    Augmentation& part =
        parts
            .emplace(root[i],
                     Augmentation{ArenaTag::hom_value, {}, {}, {}})
            .first->second;
    remap[i] = static_cast<int>(part.display.size());
    part.display.push_back(q.aug.display[i]);
    part.dynamic_parent.push_back(-1);
    part.static_parent.push_back(-1);
  }
  for (size_t i = 0; i < n; ++i) {
    Augmentation& part = parts.at(root[i]);
    int dp = q.aug.dynamic_parent[i];
    int sp = q.aug.static_parent[i];
    part.dynamic_parent[remap[i]] = dp == -1 ? -1 : remap[dp];
    part.static_parent[remap[i]] = sp == -1 ? -1 : remap[sp];
  }
  std::vector<Isogmentation> out;
  out.reserve(parts.size());
  for (auto& [r, part] : parts)
    out.push_back(canonicalize_augmentation(part));
  std::sort(out.begin(), out.end(),
            [](const Isogmentation& a, const Isogmentation& b) {
              return isog_compare(a, b) < 0;
            });
  return out;
}

// Absorbs the left component of `var` into the right side: the component
// address (i, n) becomes the right path i::n and the output move becomes
// the empty path. Events of the absorbed component that used to sit on an
// arena root now depend statically on the output root, as the arrow arena
// demands; nothing else moves.
inline Isogmentation aug_curry(const std::string& var,
                               const Isogmentation& p) {
  if (p.aug.arena != ArenaTag::hom_ground || !aug_pointed(p.aug))
    throw std::invalid_argument(
        "aug_curry expects a pointed ground-output augmentation");
  Augmentation out = p.aug;
  out.arena = ArenaTag::hom_value;
  int root = -1;
  for (size_t i = 0; i < out.dynamic_parent.size(); ++i)
    if (out.dynamic_parent[i] == -1) root = static_cast<int>(i);
  for (size_t i = 0; i < out.display.size(); ++i) {
    const Addr& d = out.display[i];
    if (addr_on_left(d) && d.sub().var_name() == var) {
      std::vector<uint32_t> path;
      const auto& comp = d.sub().sub();
      path.reserve(comp.sub().path().size() + 1);
      path.push_back(comp.tag());
      path.insert(path.end(), comp.sub().path().begin(),
                  comp.sub().path().end());
      out.display[i] = right_value_addr(std::move(path));
      if (out.static_parent[i] == -1 && static_cast<int>(i) != root)
        out.static_parent[i] = root;
    }
  }
  return canonicalize_augmentation(out);
}

inline Isogmentation aug_uncurry(const std::string& var,
                                 const Isogmentation& p) {
  if (p.aug.arena != ArenaTag::hom_value || !aug_pointed(p.aug))
    throw std::invalid_argument(
        "aug_uncurry expects a pointed base-output augmentation");
  if (display_support(p.aug).count(var))
    throw std::invalid_argument(
        "aug_uncurry: the chosen variable already appears on the left");
  Augmentation out = p.aug;
  out.arena = ArenaTag::hom_ground;
  int root = -1;
  for (size_t i = 0; i < out.dynamic_parent.size(); ++i)
    if (out.dynamic_parent[i] == -1) root = static_cast<int>(i);
  for (size_t i = 0; i < out.display.size(); ++i) {
    const Addr& d = out.display[i];
    if (addr_on_left(d)) continue;
    if (static_cast<int>(i) == root) {
      out.display[i] = right_ground_addr();
      continue;
    }
    const auto& path = d.sub().path();
    std::vector<uint32_t> rest(path.begin() + 1, path.end());
    bool was_component_root = rest.empty();
    out.display[i] = left_addr(var, path.front(), std::move(rest));
    if (was_component_root) {
      if (out.static_parent[i] != root)
        throw std::invalid_argument(
            "aug_uncurry: a component root does not hang off the output");
      out.static_parent[i] = -1;
    }
  }
  return canonicalize_augmentation(out);
}

// A call to component `index` of `var` with the given stream of arguments:
// a fresh negative output move, then the positive call move, then the
// argument augmentation with its right side re-displayed under the call.
inline Isogmentation aug_lift(const std::string& var, uint32_t index,
                              const Isogmentation& q) {
  if (q.aug.arena != ArenaTag::hom_stream)
    throw std::invalid_argument(
        "aug_lift expects a stream-output augmentation");
  Augmentation out;
  out.arena = ArenaTag::hom_ground;
  size_t n = q.aug.display.size();
  out.dynamic_parent.assign(n + 2, -1);
  out.static_parent.assign(n + 2, -1);
  out.display.assign(n + 2, Addr::list({}));
  out.display[0] = right_ground_addr();
  out.display[1] = left_addr(var, index, {});
  out.dynamic_parent[1] = 0;
  for (size_t i = 0; i < n; ++i) {
    int dp = q.aug.dynamic_parent[i];
    int sp = q.aug.static_parent[i];
    const Addr& d = q.aug.display[i];
    out.dynamic_parent[i + 2] = dp == -1 ? 1 : dp + 2;
    if (sp != -1)
      out.static_parent[i + 2] = sp + 2;
    else if (!addr_on_left(d))
      out.static_parent[i + 2] = 1;
    if (addr_on_left(d)) {
      out.display[i + 2] = d;
    } else {
      std::vector<uint32_t> path;
      path.reserve(d.sub().sub().path().size() + 1);
      path.push_back(d.sub().tag());
      path.insert(path.end(), d.sub().sub().path().begin(),
                  d.sub().sub().path().end());
      out.display[i + 2] = left_addr(var, index, std::move(path));
    }
  }
  return canonicalize_augmentation(out);
}

inline std::tuple<std::string, uint32_t, Isogmentation> aug_unlift(
    const Isogmentation& p) {
  if (p.aug.arena != ArenaTag::hom_ground || !aug_pointed(p.aug))
    throw std::invalid_argument(
        "aug_unlift expects a pointed ground-output augmentation");
  size_t n = p.aug.display.size();
  int root = -1;
  for (size_t i = 0; i < n; ++i)
    if (p.aug.dynamic_parent[i] == -1) root = static_cast<int>(i);
  std::vector<int> root_children;
  for (size_t i = 0; i < n; ++i)
    if (p.aug.dynamic_parent[i] == root) root_children.push_back(i);
  if (root_children.size() != 1)
    throw std::invalid_argument(
        "aug_unlift: the output move must enable exactly one call");
  int call = root_children[0];
  const Addr& cd = p.aug.display[call];
  if (!addr_on_left(cd) || !detail::inner_path(cd).empty())
    throw std::invalid_argument(
        "aug_unlift: the call move must open a variable component");
  std::string var = cd.sub().var_name();
  uint32_t index = cd.sub().sub().tag();
  // Events statically above the call move form the argument stream.
  std::vector<bool> above(n, false);
  for (size_t i = 0; i < n; ++i) {
    int cur = static_cast<int>(i);
    while (cur != -1 && cur != call) cur = p.aug.static_parent[cur];
    above[i] = cur == call && static_cast<int>(i) != call;
  }
  Augmentation out;
  out.arena = ArenaTag::hom_stream;
  std::vector<int> remap(n, -1);
  for (size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) == root || static_cast<int>(i) == call) continue;
    remap[i] = static_cast<int>(out.display.size());
    const Addr& d = p.aug.display[i];
    if (above[i]) {
      if (!addr_on_left(d) || d.sub().var_name() != var ||
          d.sub().sub().tag() != index)
        throw std::invalid_argument(
            "aug_unlift: an argument event escapes the called component");
      const auto& path = d.sub().sub().sub().path();
      std::vector<uint32_t> rest(path.begin() + 1, path.end());
      out.display.push_back(
          right_stream_addr(path.front(), std::move(rest)));
    } else {
      out.display.push_back(d);
    }
    out.dynamic_parent.push_back(-1);
    out.static_parent.push_back(-1);
  }
  for (size_t i = 0; i < n; ++i) {
    if (remap[i] == -1) continue;
    int dp = p.aug.dynamic_parent[i];
    int sp = p.aug.static_parent[i];
    out.dynamic_parent[remap[i]] =
        dp == -1 || dp == call || dp == root ? -1 : remap[dp];
    out.static_parent[remap[i]] =
        sp == -1 || sp == call || sp == root ? -1 : remap[sp];
  }
  return {std::move(var), index,
          canonicalize_augmentation(out)};
}

// ---------------------------------------------------------------------------
// Normal expressions as isogmentations

enum class TermSort : uint8_t { value, base, bag, stream };

namespace detail {

inline Isogmentation encode_value(const ValuePtr& m,
                                  const std::set<std::string>& vars);
inline Isogmentation encode_bag(const Bag& b,
                                const std::set<std::string>& vars);
inline Isogmentation encode_stream(const Stream& s,
                                   const std::set<std::string>& vars);

inline Isogmentation encode_base(const Base& b,
                                 const std::set<std::string>& vars) {
  if (b.head.kind == Head::Kind::Bound)
    throw std::invalid_argument("encode reached a dangling bound head");
  if (b.head.kind == Head::Kind::Value)
    throw std::invalid_argument("encode requires a normal expression");
  return aug_lift(b.head.name, b.head.index, encode_stream(b.args, vars));
}

inline Isogmentation encode_value(const ValuePtr& m,
                                  const std::set<std::string>& vars) {
  auto [x, body] = open_binder(m, vars);
  std::set<std::string> inner = vars;
  inner.insert(x);
  return aug_curry(x, encode_base(body, inner));
}

inline Isogmentation encode_bag(const Bag& b,
                                const std::set<std::string>& vars) {
  std::vector<Isogmentation> parts;
  parts.reserve(b.elems.size());
  for (const auto& e : b.elems) parts.push_back(encode_value(e, vars));
  return aug_bag(parts);
}

inline Isogmentation encode_stream(const Stream& s,
                                   const std::set<std::string>& vars) {
  Isogmentation acc = empty_isog(ArenaTag::hom_stream);
  for (size_t i = s.bags.size(); i-- > 0;)
    acc = aug_cons(encode_bag(s.bags[i], vars), acc);
  return acc;
}

inline bool expr_normal(const ResourceExpr& e) {
  if (std::holds_alternative<ValuePtr>(e))
    return redexes(std::get<ValuePtr>(e)).empty();
  if (std::holds_alternative<Base>(e))
    return redexes(std::get<Base>(e)).empty();
  if (std::holds_alternative<Bag>(e)) {
    for (const auto& m : std::get<Bag>(e).elems)
      if (!redexes(m).empty()) return false;
    return true;
  }
  for (const auto& b : std::get<Stream>(e).bags)
    for (const auto& m : b.elems)
      if (!redexes(m).empty()) return false;
  return true;
}

inline std::set<std::string> expr_free_names(const ResourceExpr& e) {
  if (std::holds_alternative<ValuePtr>(e))
    return free_names(std::get<ValuePtr>(e));
  if (std::holds_alternative<Base>(e))
    return free_names(std::get<Base>(e));
  if (std::holds_alternative<Bag>(e)) return free_names(std::get<Bag>(e));
  return free_names(std::get<Stream>(e));
}

}  // namespace detail

inline Isogmentation encode(const ResourceExpr& e,
                            const std::set<std::string>& vars) {
  if (!detail::expr_normal(e))
    throw std::invalid_argument("encode requires a normal expression");
  for (const auto& x : detail::expr_free_names(e))
    if (!vars.count(x))
      throw std::invalid_argument(
          "encode: free variable outside the declared set: " + x);
  if (std::holds_alternative<ValuePtr>(e))
    return detail::encode_value(std::get<ValuePtr>(e), vars);
  if (std::holds_alternative<Base>(e))
    return detail::encode_base(std::get<Base>(e), vars);
  if (std::holds_alternative<Bag>(e))
    return detail::encode_bag(std::get<Bag>(e), vars);
  return detail::encode_stream(std::get<Stream>(e), vars);
}

namespace detail {

inline ValuePtr decode_value(const Isogmentation& q,
                             const std::set<std::string>& vars);
inline Bag decode_bag(const Isogmentation& q,
                      const std::set<std::string>& vars);
inline Stream decode_stream(const Isogmentation& q,
                            const std::set<std::string>& vars);

inline Base decode_base(const Isogmentation& q,
                        const std::set<std::string>& vars) {
  auto [var, index, args] = aug_unlift(q);
  return mk_base(Head::free(var, index), decode_stream(args, vars));
}

inline ValuePtr decode_value(const Isogmentation& q,
                             const std::set<std::string>& vars) {
  std::string x = fresh_name(vars);
  std::set<std::string> inner = vars;
  inner.insert(x);
  return close_binder(x, decode_base(aug_uncurry(x, q), inner));
}

inline Bag decode_bag(const Isogmentation& q,
                      const std::set<std::string>& vars) {
  std::vector<ValuePtr> elems;
  for (const auto& part : aug_unbag(q))
    elems.push_back(decode_value(part, vars));
  return mk_bag(std::move(elems));
}

inline Stream decode_stream(const Isogmentation& q,
                            const std::set<std::string>& vars) {
  if (isog_size(q) == 0) return iota();
  auto [head, tail] = aug_uncons(q);
  return mk_cons(decode_bag(head, vars), decode_stream(tail, vars));
}

}  // namespace detail

inline ResourceExpr decode(const Isogmentation& q,
                           const std::set<std::string>& vars,
                           TermSort sort) {
  validate_augmentation(q.aug);
  for (const auto& x : display_support(q.aug))
    if (!vars.count(x))
      throw std::invalid_argument(
          "decode: display variable outside the declared set: " + x);
  switch (sort) {
    case TermSort::value:
      return detail::decode_value(q, vars);
    case TermSort::base:
      return detail::decode_base(q, vars);
    case TermSort::bag:
      return detail::decode_bag(q, vars);
    case TermSort::stream:
      return detail::decode_stream(q, vars);
  }
  throw std::logic_error("unreachable term sort");
}

// ---------------------------------------------------------------------------
// Rendering

// DOT digraph: solid edges follow the dynamic order, dashed edges the
// static one; each node shows its polarity sign and display address.
inline std::string export_dot(const Augmentation& q) {
  std::ostringstream os;
  os << "digraph augmentation {\n";
  for (size_t i = 0; i < q.display.size(); ++i)
    os << "  e" << i << " [label=\""
       << (addr_negative(q.arena, q.display[i]) ? "- " : "+ ")
       << addr_text(q.display[i]) << "\"];\n";
  for (size_t i = 0; i < q.display.size(); ++i)
    if (q.dynamic_parent[i] != -1)
      os << "  e" << q.dynamic_parent[i] << " -> e" << i << ";\n";
  for (size_t i = 0; i < q.display.size(); ++i)
    if (q.static_parent[i] != -1)
      os << "  e" << q.static_parent[i] << " -> e" << i
         << " [style=dashed];\n";
  os << "}\n";
  return os.str();
}

inline std::string export_dot(const Isogmentation& q) {
  return export_dot(q.aug);
}

// One event per line: id, dynamic parent, static parent, display address.
inline std::string serialize_augmentation(const Augmentation& q) {
  std::ostringstream os;
  auto cell = [&](int v) {
    if (v == -1)
      os << '-';
    else
      os << v;
  };
  for (size_t i = 0; i < q.display.size(); ++i) {
    os << i << '\t';
    cell(q.dynamic_parent[i]);
    os << '\t';
    cell(q.static_parent[i]);
    os << '\t' << addr_text(q.display[i]) << '\n';
  }
  return os.str();
}

inline std::string serialize_augmentation(const Isogmentation& q) {
  return serialize_augmentation(q.aug);
}

}  // namespace rescal

#endif  // RESCAL_GAMES_HPP
