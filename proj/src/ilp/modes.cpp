#include "ethmon/ilp/modes.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "ethmon/errors.hpp"

namespace ethmon::ilp {

namespace {

std::string strip(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

bool valid_symbol(const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

ModeDeclaration parse_line(const std::string& raw, std::size_t lineno) {
  auto fail = [&](const std::string& why) {
    return ConfigError("modes line " + std::to_string(lineno) + ": " + why);
  };
  std::string s = strip(raw);
  if (!s.empty() && s.back() == '.') s.pop_back();

  ModeDeclaration m;
  if (s.rfind("modeh(", 0) == 0) {
    m.kind = ModeKind::Head;
  } else if (s.rfind("modeb(", 0) == 0) {
    m.kind = ModeKind::Body;
  } else {
    throw fail("expected modeh(...) or modeb(...)");
  }
  if (s.back() != ')') throw fail("unbalanced parentheses");
  std::string inner = s.substr(6, s.size() - 7);

  const std::string flag = ",negatable";
  if (inner.size() > flag.size() && inner.compare(inner.size() - flag.size(), flag.size(), flag) == 0) {
    if (m.kind == ModeKind::Head) throw fail("only body modes may be negatable");
    m.negatable = true;
    inner.resize(inner.size() - flag.size());
  }

  std::size_t open = inner.find('(');
  m.predicate = inner.substr(0, open);
  if (!valid_symbol(m.predicate)) throw fail("bad predicate name '" + m.predicate + "'");
  if (open != std::string::npos) {
    if (inner.back() != ')') throw fail("unbalanced parentheses");
    std::string args = inner.substr(open + 1, inner.size() - open - 2);
    std::stringstream in(args);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (item.size() < 2) throw fail("bad argument mode '" + item + "'");
      ArgMode a;
      switch (item[0]) {
        case '+': a.placement = Placement::Input; break;
        case '-': a.placement = Placement::Output; break;
        case '#': a.placement = Placement::Constant; break;
        default: throw fail("argument mode must start with +, - or #");
      }
      a.type = item.substr(1);
      if (!valid_symbol(a.type)) throw fail("bad type name '" + a.type + "'");
      m.args.push_back(std::move(a));
    }
    if (m.args.empty()) throw fail("empty argument list");
  }
  if (m.kind == ModeKind::Head &&
      std::none_of(m.args.begin(), m.args.end(), [](const ArgMode& a) { return a.placement != Placement::Constant; })) {
    throw fail("head mode needs an input or output argument");
  }
  if (m.negatable && std::any_of(m.args.begin(), m.args.end(),
                                 [](const ArgMode& a) { return a.placement != Placement::Input; })) {
    throw fail("negatable modes take input arguments only");
  }
  return m;
}

bool matches(const ModeDeclaration& m, const asp::Atom& a) {
  if (m.predicate != a.predicate || m.args.size() != a.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    bool var = a.args[i].is_variable();
    if ((m.args[i].placement == Placement::Constant) == var) return false;
  }
  return true;
}

}  // namespace

std::vector<ModeDeclaration> parse_modes(std::string_view text) {
  std::vector<ModeDeclaration> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = strip(line);
    if (s.empty() || s[0] == '%' || s[0] == '#') continue;
    out.push_back(parse_line(line, lineno));
  }
  return out;
}

std::vector<ModeDeclaration> load_modes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read modes file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_modes(buf.str());
}

std::string to_string(const ModeDeclaration& m) {
  std::string out = m.kind == ModeKind::Head ? "modeh(" : "modeb(";
  out += m.predicate;
  if (!m.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < m.args.size(); ++i) {
      if (i) out += ", ";
      const auto& a = m.args[i];
      out += a.placement == Placement::Input ? '+' : a.placement == Placement::Output ? '-' : '#';
      out += a.type;
    }
    out += ')';
  }
  if (m.negatable) out += ", negatable";
  out += ')';
  return out;
}

const ModeDeclaration* find_head_mode(const std::vector<ModeDeclaration>& modes, const asp::Atom& a) {
  for (const auto& m : modes) {
    if (m.kind == ModeKind::Head && m.predicate == a.predicate && m.args.size() == a.arity()) return &m;
  }
  return nullptr;
}

bool conforms(const asp::Rule& r, const std::vector<ModeDeclaration>& modes) {
  auto head_ok = std::any_of(modes.begin(), modes.end(), [&](const ModeDeclaration& m) {
    return m.kind == ModeKind::Head && matches(m, r.head);
  });
  if (!head_ok) return false;

  std::set<std::string> bound;
  for (const auto& t : r.head.args) {
    if (t.is_variable()) bound.insert(t.name());
  }
  for (const auto& l : r.body) {
    const ModeDeclaration* fit = nullptr;
    for (const auto& m : modes) {
      if (m.kind != ModeKind::Body || !matches(m, l.atom) || (l.negated() && !m.negatable)) continue;
      bool inputs_bound = true;
      for (std::size_t i = 0; i < m.args.size(); ++i) {
        if (m.args[i].placement == Placement::Input && !bound.count(l.atom.args[i].name())) inputs_bound = false;
      }
      if (inputs_bound) {
        fit = &m;
        break;
      }
    }
    if (!fit) return false;
    for (const auto& t : l.atom.args) {
      if (t.is_variable()) bound.insert(t.name());
    }
  }
  return true;
}

}  // namespace ethmon::ilp
