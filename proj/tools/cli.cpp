#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "smb/certificate.hpp"
#include "smb/errors.hpp"
#include "smb/laws.hpp"
#include "smb/ord_expr.hpp"
#include "smb/unifier.hpp"

namespace smbtree {
namespace {

using namespace smb;

// Raised for unreadable files; reported like a parse error.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void report_parse_error(std::ostream& err, const ParseError& e, const std::string& text) {
  err << "error: " << e.what() << "\n";
  if (text.find('\n') != std::string::npos || text.size() > 200) return;
  err << "  " << text << "\n  " << std::string(std::min(e.position(), text.size()), ' ') << "^\n";
}

OrdExpr expr_arg(const std::string& text, std::ostream& err) {
  try {
    return parse_expr(text);
  } catch (const ParseError& e) {
    report_parse_error(err, e, text);
    throw;
  }
}

std::string where(const std::string& path) { return path.empty() ? "." : path; }

void print_report(std::ostream& out, const AuditReport& r) {
  out << to_string(r.verdict);
  if (r.verdict != Verdict::Pass) out << " at " << r.path << ": " << r.reason;
  out << " (" << r.nodes_visited << " nodes)\n";
}

int code_for(const AuditReport& r) {
  switch (r.verdict) {
    case Verdict::Pass: return kOk;
    case Verdict::BudgetExhausted: return kUnknown;
    case Verdict::Fail: return kAuditFail;
  }
  return kAuditFail;
}

int cmd_parse(const std::string& text, bool desugared, std::ostream& out, std::ostream& err) {
  OrdExpr e = expr_arg(text, err);
  out << print_expr(desugared ? desugar(e) : e) << "\n";
  auto fv = free_vars(e);
  if (!fv.empty()) {
    err << "note: free variables:";
    for (const auto& v : fv) err << " " << v;
    err << "\n";
  }
  return kOk;
}

int cmd_simplify(const std::string& text, bool steps, bool certify_steps, std::ostream& out, std::ostream& err) {
  OrdExpr e = expr_arg(text, err);
  Simplification s = simplify(e);
  int code = kOk;
  if (steps || certify_steps) {
    out << print_expr(e) << "\n";
    for (const auto& st : s.steps) {
      out << "  = " << print_expr(resugar(st.after)) << "    [" << to_string(st.rule) << " at " << where(st.path) << "]";
      if (certify_steps) {
        try {
          Equiv q = certify(st);
          AuditReport f = audit(q.fwd.get(), standard_budget());
          AuditReport b = audit(q.bwd.get(), standard_budget());
          out << " fwd " << to_string(f.verdict) << ", bwd " << to_string(b.verdict);
          code = std::max(code, std::max(code_for(f), code_for(b)));
        } catch (const UnboundVariable&) {
          // Steps under free variables have no closed endpoints to certify.
          out << " open";
        }
      }
      out << "\n";
    }
  }
  out << print_expr(s.result) << "\n";
  return code;
}

int cmd_cmp(const std::string& a_text, const std::string& b_text, const SearchBudget& budget,
            const std::string& emit, std::ostream& out, std::ostream& err) {
  OrdExpr a = expr_arg(a_text, err);
  OrdExpr b = expr_arg(b_text, err);
  CompareResult r = cmd_compare(a, b, budget);
  out << to_string(r.outcome) << "\n";
  if (!r.note.empty()) out << "note: " << r.note << "\n";
  if (r.outcome == Comparison::Unknown) return kUnknown;
  if (emit == "-") {
    out << r.certificate;
  } else if (!emit.empty()) {
    std::ofstream f(emit, std::ios::binary);
    if (!f || !(f << r.certificate)) throw InputError("cannot write " + emit);
  }
  return kOk;
}

int cmd_check_file(const std::string& path, const std::string& a_text, const std::string& b_text,
                   const AuditBudget& budget, std::ostream& out, std::ostream& err) {
  std::string text = read_input(path);
  OrdExpr a = expr_arg(a_text, err);
  OrdExpr b = expr_arg(b_text, err);
  AuditReport r = cmd_check(text, a, b, budget);
  print_report(out, r);
  return code_for(r);
}

int cmd_laws(std::size_t trials, std::uint64_t seed, const std::vector<std::string>& only, bool timing,
             std::ostream& out) {
  LawSuiteOptions o;
  o.trials = trials;
  o.seed = seed;
  o.laws = only;
  for (const auto& l : only)
    if (std::find(law_names().begin(), law_names().end(), l) == law_names().end())
      throw InputError("unknown law '" + l + "'");
  auto rows = run_law_suite(o);
  out << std::left << std::setw(14) << "law" << std::right << std::setw(7) << "cases" << std::setw(7) << "pass"
      << std::setw(7) << "fail" << std::setw(11) << "exhausted";
  if (timing) out << std::setw(10) << "seconds";
  out << "\n";
  bool failed = false, exhausted = false;
  for (const auto& r : rows) {
    out << std::left << std::setw(14) << r.law << std::right << std::setw(7) << r.cases << std::setw(7) << r.passed
        << std::setw(7) << r.failed << std::setw(11) << r.exhausted;
    if (timing) out << std::setw(10) << std::fixed << std::setprecision(3) << r.seconds;
    out << "\n";
    failed |= r.failed > 0;
    exhausted |= r.exhausted > 0;
  }
  for (const auto& r : rows)
    for (const auto& c : r.failures) {
      out << "FAIL " << c.law << " on " << c.operands << ": ";
      if (!c.error.empty())
        out << c.error;
      else {
        const AuditReport& bad = c.fwd.passed() ? c.bwd : c.fwd;
        out << (c.fwd.passed() ? "bwd " : "fwd ") << to_string(bad.verdict) << " at " << bad.path << ": " << bad.reason;
      }
      out << "\n";
    }
  return failed ? kAuditFail : exhausted ? kUnknown : kOk;
}

HTree htree_file(const std::string& path, std::ostream& err) {
  std::string text = read_input(path);
  try {
    return parse_htree(text);
  } catch (const ParseError& e) {
    err << path << ": ";
    report_parse_error(err, e, text);
    throw;
  }
}

int cmd_demo_unify(const std::string& f1, const std::string& f2, std::size_t probes, bool audited,
                   std::ostream& out, std::ostream& err) {
  HTree a = htree_file(f1, err);
  HTree b = htree_file(f2, err);
  UnifyOptions o;
  o.fun_probes = probes;
  o.wf.audit_witnesses = audited;
  UnifyStats st;
  std::optional<HTree> r;
  try {
    r = unify(a, b, o, &st);
  } catch (const DescentViolation& e) {
    err << "error: descent witness rejected: " << e.what() << "\n";
    return kAuditFail;
  } catch (const WatchdogTripped& e) {
    err << "error: " << e.what() << "\n";
    return kAuditFail;
  }
  out << (r ? print_htree(*r) : "no unifier") << "\n";
  out << "calls " << st.calls << ", descents " << st.descents
      << (audited ? ", every descent witness audited" : "") << "\n";
  return r ? kOk : kUnknown;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strictly monotone Brouwer trees: parse, simplify and compare ordinal expressions", "smbtree"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "smbtree 0.1.0");

  std::string a, b, file, emit;
  bool steps = false, certify_steps = false, desugared = false, timing = false, no_audit = false;
  std::size_t budget = SearchBudget{}.max_nodes, samples = 16, trials = 300, probes = 4;
  std::size_t audit_nodes = standard_budget().max_nodes;
  std::uint64_t seed = 0xC0FFEE;
  std::vector<std::string> laws;

  auto* p = app.add_subcommand("parse", "Parse an expression and print it in canonical form");
  p->add_option("EXPR", a, "expression")->required();
  p->add_flag("--desugar", desugared, "expand numerals into successor chains");

  auto* s = app.add_subcommand("simplify", "Rewrite an expression to normal form");
  s->add_option("EXPR", a, "expression")->required();
  s->add_flag("--steps", steps, "print each rewrite step");
  s->add_flag("--certify", certify_steps, "print each step and audit its equivalence certificate");

  auto* c = app.add_subcommand("cmp", "Search for a derivation of A < B or A <= B");
  c->add_option("A", a, "left expression")->required();
  c->add_option("B", b, "right expression")->required();
  c->add_option("--budget", budget, "search node budget")->capture_default_str();
  c->add_option("--seed", seed, "sampling seed")->capture_default_str();
  c->add_option("--emit-deriv", emit, "write the certificate to FILE ('-' for stdout)");

  auto* k = app.add_subcommand("check", "Check a certificate against two expressions");
  k->add_option("FILE", file, "certificate file ('-' for stdin)")->required();
  k->add_option("A", a, "left expression")->required();
  k->add_option("B", b, "right expression")->required();
  k->add_option("--nodes", audit_nodes, "audit node budget")->capture_default_str();
  k->add_option("--samples", samples, "branches sampled per limit")->capture_default_str();
  k->add_option("--seed", seed, "sampling seed")->capture_default_str();

  auto* l = app.add_subcommand("laws", "Audit the join and limit laws on random operands");
  l->add_option("--trials", trials, "cases per law")->capture_default_str();
  l->add_option("--seed", seed, "generator seed")->capture_default_str();
  l->add_option("--law", laws, "run only this law (repeatable)");
  l->add_flag("--timing", timing, "add a seconds column");

  auto* u = app.add_subcommand("demo-unify", "Unify two labelled trees with audited termination");
  u->add_option("F1", a, "first tree file ('-' for stdin)")->required();
  u->add_option("F2", b, "second tree file")->required();
  u->add_option("--probes", probes, "fun children unified eagerly")->capture_default_str();
  u->add_flag("--no-audit", no_audit, "skip auditing descent witnesses");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*p) return cmd_parse(a, desugared, out, err);
    if (*s) return cmd_simplify(a, steps, certify_steps, out, err);
    if (*c) return cmd_cmp(a, b, SearchBudget{budget, samples, seed}, emit, out, err);
    if (*k) return cmd_check_file(file, a, b, AuditBudget{audit_nodes, samples, seed}, out, err);
    if (*l) return cmd_laws(trials, seed, laws, timing, out);
    if (*u) return cmd_demo_unify(a, b, probes, !no_audit, out, err);
  } catch (const ParseError&) {
    return kInputError;
  } catch (const DeserializeError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const UnboundVariable& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace smbtree
