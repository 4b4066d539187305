#include "sp/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sp/alignment.hpp"
#include "sp/coding.hpp"
#include "sp/learning.hpp"

namespace sp {

namespace {

struct Options {
  std::string grammar, new_path, pattern, corpus, audit, out_dir, id_marks;
  std::size_t beam = 200, grammar_beam = 20, results = 10;
  std::string code_mode = "sfe";
  std::uint32_t alphabet = 2;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  // score
  std::string entropy, redundancy;
  std::optional<unsigned> search_space;
  bool grammar_t = false;
};

/// Thrown for bad input; mapped to exit 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SymbolClassifier classifier_of(const Options& o) {
  SymbolClassifier c;
  std::string s = o.id_marks;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  for (std::string m; in >> m;) c.add_id_mark(m);
  return c;
}

CodeSchemeOptions coding_of(const Options& o) {
  CodeSchemeOptions c;
  c.mode = parse_code_size_mode(o.code_mode);
  c.alphabet_size = o.alphabet;
  return c;
}

BuildConfig build_of(const Options& o) {
  BuildConfig b;
  b.beam = o.beam;
  b.results = o.results;
  b.coding = coding_of(o);
  b.threads = o.threads;
  return b;
}

std::vector<Pattern> new_patterns(const Options& o, const SymbolClassifier& cls) {
  if (!o.pattern.empty()) return {Pattern::from_text(o.pattern, 1, Role::New, cls)};
  if (o.new_path.empty()) throw InputError("one of --new or --pattern is required");
  auto c = load_corpus(o.new_path, cls);
  if (c.patterns.empty()) throw InputError(o.new_path + ": no New pattern");
  return c.patterns;
}

std::string join(const std::vector<MarkId>& ms) {
  std::string s;
  for (auto m : ms) s += (s.empty() ? "" : " ") + mark_name(m);
  return s;
}

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
}

void print_alignment(std::ostream& out, const Alignment& a, std::optional<double> p_rel) {
  out << a.id << "  CD " << number(a.score.cd) << "  CR " << (a.score.cr ? number(*a.score.cr) : "undefined")
      << "  B_N " << number(a.score.bn) << "  B_E " << number(a.score.be);
  if (p_rel) out << "  p_REL " << number(*p_rel);
  out << "\n" << render_alignment(a) << "code: " << join(derive_code_pattern(a)) << "\n";
  auto res = residue_positions(a);
  if (!res.empty()) {
    out << "residue:";
    for (auto p : res) out << " " << a.ctx->new_pattern[p].mark << "@" << p;
    out << "\n";
  }
  out << "\n";
}

int cmd_align(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cls = classifier_of(o);
  auto grammar = std::make_shared<const Grammar>(load_grammar(o.grammar, cls));
  if (grammar->empty()) throw InputError(o.grammar + ": empty grammar");
  int status = kExitOk;
  AuditTrail trail;
  for (const auto& np : new_patterns(o, cls)) {
    auto res = build_alignments(np, grammar, build_of(o));
    out << "New: " << np.text() << "\n";
    if (res.empty()) {
      err << "no alignment for '" << np.text() << "'\n";
      status = kExitEmpty;
      continue;
    }
    auto probs = alignment_probabilities(res);
    std::map<std::string, double> p_rel;
    for (const auto& m : probs.members) p_rel[m.alignment.id] = m.p_rel;
    for (auto k : res.ranked) {
      const auto& a = res.retained[k];
      auto it = p_rel.find(a.id);
      print_alignment(out, a, it == p_rel.end() ? std::nullopt : std::optional<double>(it->second));
    }
    auto t = audit_trail(res);
    trail.roots.insert(trail.roots.end(), t.roots.begin(), t.roots.end());
    trail.records.insert(trail.records.end(), t.records.begin(), t.records.end());
  }
  if (!o.audit.empty()) {
    const bool json = o.audit.size() > 5 && o.audit.substr(o.audit.size() - 5) == ".json";
    write_file(o.audit, json ? trail.to_json() : trail.to_text());
  }
  return status;
}

int cmd_reason(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cls = classifier_of(o);
  auto grammar = std::make_shared<const Grammar>(load_grammar(o.grammar, cls));
  if (grammar->empty()) throw InputError(o.grammar + ": empty grammar");
  int status = kExitOk;
  for (const auto& np : new_patterns(o, cls)) {
    auto res = build_alignments(np, grammar, build_of(o));
    out << "New: " << np.text() << "\n";
    if (res.empty()) {
      err << "no alignment for '" << np.text() << "'\n";
      status = kExitEmpty;
      continue;
    }
    auto rep = alignment_probabilities(res);
    out << "reference set: " << rep.members.size() << " alignment(s), sum p_A " << number(rep.p_a_sum) << "\n\n";
    for (const auto& m : rep.members) {
      out << m.alignment.id << "  p_REL " << number(m.p_rel) << "  p_ABS " << number(m.p_abs) << "  B_E "
          << number(m.alignment.score.be) << "\n"
          << render_alignment(m.alignment);
      auto inf = extract_inferences(m.alignment);
      out << "inferences:";
      for (const auto& i : inf) out << " " << i.mark << "(" << i.pattern_id << ")";
      out << "\n\n";
    }
  }
  return status;
}

int cmd_learn(const Options& o, std::ostream& out, std::ostream&) {
  const auto cls = classifier_of(o);
  auto corpus = load_corpus(o.corpus, cls);
  if (corpus.patterns.empty()) throw InputError(o.corpus + ": empty corpus");
  LearnConfig cfg;
  cfg.grammar_beam = o.grammar_beam;
  cfg.coding = coding_of(o);
  cfg.build.beam = o.beam;
  cfg.build.threads = o.threads;
  Grammar initial;
  if (!o.grammar.empty()) initial = load_grammar(o.grammar, cls);
  auto ranked = learn_grammars(corpus, cfg, o.grammar.empty() ? nullptr : &initial);

  const auto verbatim = score_grammar(verbatim_grammar(corpus), corpus, cfg).score;
  out << "rank        G        E        T\n";
  const std::size_t shown = std::min(ranked.size(), std::max<std::size_t>(o.results, 1));
  for (std::size_t k = 0; k < shown; ++k) {
    const auto& s = ranked[k].report.score;
    out << std::setw(4) << k + 1 << std::setw(9) << number(s.g) << std::setw(9) << number(s.e) << std::setw(9)
        << number(s.t) << "\n";
  }
  out << "verbatim" << std::setw(5) << number(verbatim.g) << std::setw(9) << number(verbatim.e) << std::setw(9)
      << number(verbatim.t) << "\n\n";
  out << "; best grammar\n" << serialize_pattern_file(ranked[0].grammar.patterns, ranked[0].grammar.classifier);

  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    for (std::size_t k = 0; k < shown; ++k) {
      const auto base = o.out_dir + "/grammar" + std::to_string(k + 1);
      write_file(base + ".spg", serialize_pattern_file(ranked[k].grammar.patterns, ranked[k].grammar.classifier));
      write_file(base + ".prov", provenance_to_text(ranked[k].provenance));
    }
  }
  return kExitOk;
}

std::vector<double> numbers(const std::string& list) {
  std::vector<double> v;
  std::string s = list;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError("not a number: '" + tok + "'");
    }
  }
  return v;
}

int cmd_score(const Options& o, std::ostream& out, std::ostream&) {
  bool any = false;
  if (!o.entropy.empty()) {
    auto p = numbers(o.entropy);
    try {
      out << "entropy " << number(entropy(p)) << "\n";
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    any = true;
  }
  if (!o.redundancy.empty()) {
    // pairs f:s
    std::vector<std::pair<double, double>> fs;
    std::string s = o.redundancy;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    for (std::string tok; in >> tok;) {
      auto colon = tok.find(':');
      if (colon == std::string::npos) throw InputError("redundancy expects f:s pairs, got '" + tok + "'");
      auto f = numbers(tok.substr(0, colon)), z = numbers(tok.substr(colon + 1));
      if (f.size() != 1 || z.size() != 1) throw InputError("bad pair '" + tok + "'");
      fs.push_back({f[0], z[0]});
    }
    out << "redundancy " << number(redundancy(fs)) << "\n";
    any = true;
  }
  if (o.search_space) {
    auto ss = search_space_stats(*o.search_space);
    out << "P=" << ss.P << " C=" << ss.C << "\n";
    any = true;
  }
  if (o.grammar_t) {
    if (o.grammar.empty() || o.corpus.empty()) throw InputError("--grammar-T needs --grammar and --corpus");
    const auto cls = classifier_of(o);
    auto g = load_grammar(o.grammar, cls);
    auto corpus = load_corpus(o.corpus, cls);
    if (g.empty()) throw InputError(o.grammar + ": empty grammar");
    if (corpus.patterns.empty()) throw InputError(o.corpus + ": empty corpus");
    LearnConfig cfg;
    cfg.coding = coding_of(o);
    cfg.build.beam = o.beam;
    auto s = score_grammar(g, corpus, cfg).score;
    auto v = score_grammar(verbatim_grammar(corpus), corpus, cfg).score;
    out << "G " << number(s.g) << "\nE " << number(s.e) << "\nT " << number(s.t) << "\n";
    out << "verbatim G " << number(v.g) << "\nverbatim E " << number(v.e) << "\nverbatim T " << number(v.t) << "\n";
    any = true;
  }
  if (!any) throw InputError("score: nothing requested (--entropy, --redundancy, --search-space, --grammar-T)");
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"SP multiple alignment, grammar induction and reasoning", "spcm"};
  app.require_subcommand(1, 1);

  auto common = [&](CLI::App* s) {
    s->add_option("--beam", o.beam, "alignment beam width W")->check(CLI::PositiveNumber);
    s->add_option("--results", o.results, "alignments or grammars reported (K)")->check(CLI::PositiveNumber);
    s->add_option("--code-mode", o.code_mode, "code sizes: sfe or ideal")->check(CLI::IsMember({"sfe", "ideal"}));
    s->add_option("--alphabet-size", o.alphabet, "|A| for match probabilities")->check(CLI::Range(2u, 1u << 30));
    s->add_option("--id-marks", o.id_marks, "extra identification marks, comma separated");
    s->add_option("--seed", o.seed, "seed (all commands are deterministic)");
    s->add_option("--threads", o.threads, "worker threads, 0 = hardware");
  };

  auto* align = app.add_subcommand("align", "build alignments of New patterns against a grammar");
  common(align);
  align->add_option("--grammar", o.grammar, "grammar file")->required();
  auto* an = align->add_option("--new", o.new_path, "file of New patterns");
  auto* ap = align->add_option("--pattern", o.pattern, "inline New pattern");
  an->excludes(ap);
  align->add_option("--audit", o.audit, "audit trail output (.json for JSON)");

  auto* reason = app.add_subcommand("reason", "reference-set probabilities and inferences");
  common(reason);
  reason->add_option("--grammar", o.grammar, "knowledge base file")->required();
  auto* rn = reason->add_option("--new", o.new_path, "file of query patterns");
  auto* rp = reason->add_option("--pattern", o.pattern, "inline query pattern");
  rn->excludes(rp);

  auto* learn = app.add_subcommand("learn", "induce grammars from a corpus");
  common(learn);
  learn->add_option("--corpus", o.corpus, "corpus file")->required();
  learn->add_option("--grammar", o.grammar, "initial grammar");
  learn->add_option("--grammar-beam", o.grammar_beam, "grammar beam W_g")->check(CLI::PositiveNumber);
  learn->add_option("--out", o.out_dir, "directory for grammar and provenance files");

  auto* score = app.add_subcommand("score", "information measures");
  common(score);
  score->add_option("--entropy", o.entropy, "comma separated probabilities");
  score->add_option("--redundancy", o.redundancy, "comma separated f:s pairs");
  score->add_option("--search-space", o.search_space, "pattern length N");
  score->add_flag("--grammar-T", o.grammar_t, "G, E and T of --grammar on --corpus, with the verbatim grammar");
  score->add_option("--grammar", o.grammar, "grammar file");
  score->add_option("--corpus", o.corpus, "corpus file");

  // learning runs many builds; narrower default there
  learn->preparse_callback([&](std::size_t) { o.beam = LearnConfig{}.build.beam; });
  score->preparse_callback([&](std::size_t) { o.beam = LearnConfig{}.build.beam; });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*align) return cmd_align(o, out, err);
    if (*reason) return cmd_reason(o, out, err);
    if (*learn) return cmd_learn(o, out, err);
    if (*score) return cmd_score(o, out, err);
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const StoreFormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace sp
