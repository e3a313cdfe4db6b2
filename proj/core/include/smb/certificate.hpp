#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "smb/ord_expr.hpp"

namespace smb {

enum class Relation { Le, Lt };
std::string to_string(Relation r);

/// A derivation in the `smbderiv/1` text format. Nodes mirror LeDeriv,
/// with two additions: Refl (re-derived from equal endpoints) and Search
/// (a limiting body that is re-derived per branch by bounded search, used
/// when the branches share no common shape).
///
/// Cocone witnesses are positions in the enumeration of the limit's code,
/// either constant or an enclosing Limiting variable plus an offset. A
/// Limiting variable stands for the position of the branch being checked.
struct CertNode {
  enum class Tag { Zero, Refl, Succ, Cocone, Limiting, Search };
  Tag tag = Tag::Zero;
  std::string var;     // Limiting: the binder; Cocone: empty for a constant
  Natural offset = 0;  // Cocone
  std::size_t search_nodes = 0;
  std::uint64_t search_seed = 0;
  std::shared_ptr<const CertNode> sub;
};

struct Certificate {
  Relation rel = Relation::Le;
  std::shared_ptr<const CertNode> root;
};

/// Endpoints of the derivation a certificate for (a, b) must prove:
/// a.raw <= b.raw, or Succ(a.raw) <= b.raw for Lt.
std::pair<Tree, Tree> certificate_endpoints(Relation rel, const OrdExpr& a, const OrdExpr& b);

struct ExtractOptions {
  std::size_t max_nodes = 50000;
  int schematic_depth = 2;         // nested Limiting levels tried before Search
  bool refl_by_probe = true;       // Refl also for observationally equal endpoints
  std::size_t search_nodes = 10000;
  std::uint64_t search_seed = 0xC0FFEE;
};

/// Reads a certificate off a derivation. nullopt when it would exceed
/// max_nodes.
std::optional<Certificate> extract_certificate(const LeDeriv& d, Relation rel, const ExtractOptions& opts = {});

/// `comment` lines are written after the header as `# ...`.
std::string write_certificate(const Certificate& c, const std::string& comment = "");
/// Throws DeserializeError.
Certificate read_certificate(std::string_view text);

/// The derivation a certificate describes between the given endpoints. Parts
/// that do not fit the endpoints fail when audited.
LeDeriv instantiate(const Certificate& c, const Tree& lhs, const Tree& rhs);

/// Deserializes against the elaborated endpoints and audits. Instantiation
/// errors are reported as a Fail. Throws DeserializeError for bad text.
AuditReport cmd_check(std::string_view text, const OrdExpr& a, const OrdExpr& b,
                      const AuditBudget& budget = standard_budget());

enum class Comparison { ProvedLe, ProvedLt, Unknown };
std::string to_string(Comparison c);

struct CompareResult {
  Comparison outcome = Comparison::Unknown;
  std::string certificate;  // smbderiv/1 text for proved results
  std::string note;
};

/// Tries a < b, then a <= b, by bounded search on the elaborated trees. A
/// proved result's certificate has passed cmd_check. Unknown is not a
/// disproof.
CompareResult cmd_compare(const OrdExpr& a, const OrdExpr& b, const SearchBudget& budget = {});

}  // namespace smb
