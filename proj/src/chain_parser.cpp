// Copyright 2026 The demotraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <type_traits>

#include <expat.h>

#include "demotraj/error.hpp"
#include "demotraj/kinematics.hpp"

namespace demotraj {
namespace {

enum class JointKind { Revolute, Fixed, Skipped };

// Joint as declared in the source, before fixed transforms are folded.
struct RawJoint {
  std::string name;
  JointKind kind = JointKind::Fixed;
  Pose origin;
  Vec3 axis = Vec3::UnitX();
  double lower = 0.0;
  double upper = 0.0;
};

// Folds fixed transforms into the following revolute joint (or the tool).
KinematicChain Fold(const std::vector<RawJoint>& raw, const Pose& tool) {
  KinematicChain chain;
  Pose pending;
  for (const RawJoint& r : raw) {
    if (r.kind != JointKind::Revolute) {
      pending = compose(pending, r.origin);
      continue;
    }
    Joint j;
    j.name = r.name;
    j.origin = compose(pending, r.origin);
    j.axis = r.axis;
    j.lower = r.lower;
    j.upper = r.upper;
    chain.joints.push_back(std::move(j));
    pending = Pose::identity();
  }
  chain.flange_to_gripper = compose(pending, tool);
  return chain;
}

std::optional<double> ToReal(std::string_view s) {
  std::string buf(s);
  std::istringstream is(buf);
  is.imbue(std::locale::classic());
  double v = 0.0;
  if (!(is >> v) || !std::isfinite(v)) return std::nullopt;
  is >> std::ws;
  if (!is.eof()) return std::nullopt;
  return v;
}

std::optional<Vec3> ToVec3(std::string_view s) {
  std::string buf(s);
  std::istringstream is(buf);
  is.imbue(std::locale::classic());
  Vec3 v;
  if (!(is >> v.x() >> v.y() >> v.z()) || !v.allFinite()) return std::nullopt;
  is >> std::ws;
  if (!is.eof()) return std::nullopt;
  return v;
}

Vec3 UnitAxis(const Vec3& axis, const std::string& source, std::size_t line) {
  const double n = axis.norm();
  if (!(n > 1e-12)) throw ParseError(source, line, "joint axis has zero length");
  return axis / n;
}

// ---------------------------------------------------------------------------
// URDF subset

struct UrdfJoint {
  RawJoint raw;
  std::string type;
  std::string parent;
  std::string child;
  bool has_limit = false;
  std::size_t line = 0;
};

struct UrdfState {
  std::string source;
  XML_Parser parser = nullptr;
  std::vector<std::string> stack;
  std::set<std::string> links;
  std::vector<UrdfJoint> joints;
  std::map<std::string, int> ignored;
  std::optional<ParseError> error;
  bool saw_robot = false;

  std::size_t Line() const {
    return static_cast<std::size_t>(XML_GetCurrentLineNumber(parser));
  }

  void Fail(const std::string& what) {
    if (!error) error.emplace(source, Line(), what);
    XML_StopParser(parser, XML_FALSE);
  }
};

const char* Attr(const XML_Char** attrs, const char* name) {
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    if (std::string_view(attrs[i]) == name) return attrs[i + 1];
  }
  return nullptr;
}

void ParseOrigin(UrdfState& st, const XML_Char** attrs, Pose& out) {
  Vec3 xyz = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();
  if (const char* s = Attr(attrs, "xyz")) {
    auto v = ToVec3(s);
    if (!v) return st.Fail(std::string("bad origin xyz '") + s + "'");
    xyz = *v;
  }
  if (const char* s = Attr(attrs, "rpy")) {
    auto v = ToVec3(s);
    if (!v) return st.Fail(std::string("bad origin rpy '") + s + "'");
    rpy = *v;
  }
  out.position = xyz;
  out.orientation = UnitQuaternion::from_rpy(rpy.x(), rpy.y(), rpy.z());
}

void XMLCALL UrdfStart(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto& st = *static_cast<UrdfState*>(data);
  if (st.error) return;
  const std::string el(name);
  const std::string parent = st.stack.empty() ? "" : st.stack.back();
  st.stack.push_back(el);

  if (parent.empty()) {
    if (el != "robot") return st.Fail("root element must be <robot>, found <" + el + ">");
    st.saw_robot = true;
    return;
  }
  if (parent == "robot" && el == "link") {
    const char* n = Attr(attrs, "name");
    if (n == nullptr) return st.Fail("<link> without name");
    if (!st.links.insert(n).second) return st.Fail(std::string("duplicate link '") + n + "'");
    return;
  }
  if (parent == "robot" && el == "joint") {
    const char* n = Attr(attrs, "name");
    const char* type = Attr(attrs, "type");
    if (n == nullptr || type == nullptr) return st.Fail("<joint> needs name and type");
    UrdfJoint j;
    j.raw.name = n;
    j.type = type;
    j.line = st.Line();
    st.joints.push_back(std::move(j));
    return;
  }
  if (parent == "joint" && !st.joints.empty()) {
    UrdfJoint& j = st.joints.back();
    if (el == "parent" || el == "child") {
      const char* link = Attr(attrs, "link");
      if (link == nullptr) return st.Fail("<" + el + "> without link");
      (el == "parent" ? j.parent : j.child) = link;
    } else if (el == "origin") {
      ParseOrigin(st, attrs, j.raw.origin);
    } else if (el == "axis") {
      const char* s = Attr(attrs, "xyz");
      auto v = s != nullptr ? ToVec3(s) : std::nullopt;
      if (!v) return st.Fail("bad or missing axis xyz");
      if (!(v->norm() > 1e-12)) return st.Fail("joint axis has zero length");
      j.raw.axis = v->normalized();
    } else if (el == "limit") {
      const char* lo = Attr(attrs, "lower");
      const char* hi = Attr(attrs, "upper");
      auto l = lo != nullptr ? ToReal(lo) : std::optional<double>(0.0);
      auto h = hi != nullptr ? ToReal(hi) : std::optional<double>(0.0);
      if (!l || !h) return st.Fail("bad joint limit");
      j.raw.lower = *l;
      j.raw.upper = *h;
      j.has_limit = true;
    } else {
      ++st.ignored[el];
    }
    return;
  }
  if (parent == "robot" || parent == "link" || parent == "joint") ++st.ignored[el];
}

void XMLCALL UrdfEnd(void* data, const XML_Char*) {
  auto& st = *static_cast<UrdfState*>(data);
  if (!st.stack.empty()) st.stack.pop_back();
}

ParsedChain ParseUrdf(std::string_view text, const ChainParseOptions& options,
                      const std::string& source) {
  UrdfState st;
  st.source = source;
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)>
      parser(XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser) throw Error("cannot create XML parser");
  st.parser = parser.get();
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), &UrdfStart, &UrdfEnd);
  const XML_Status status = XML_Parse(parser.get(), text.data(),
                                      static_cast<int>(text.size()), XML_TRUE);
  if (st.error) throw *st.error;
  if (status != XML_STATUS_OK) {
    throw ParseError(source, XML_GetCurrentLineNumber(parser.get()),
                     XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  if (!st.saw_robot) throw ParseError(source, 0, "no <robot> element");

  ParsedChain out;
  for (const auto& [el, count] : st.ignored) {
    out.warnings.push_back("ignored " + std::to_string(count) + " <" + el +
                           "> element(s)");
  }

  // Resolve the serial order parent -> child.
  std::map<std::string, const UrdfJoint*> by_parent;
  std::set<std::string> children;
  for (UrdfJoint& j : st.joints) {
    if (j.parent.empty() || j.child.empty()) {
      throw ParseError(source, j.line, "joint '" + j.raw.name + "' needs <parent> and <child>");
    }
    for (const std::string* l : {&j.parent, &j.child}) {
      if (st.links.count(*l) == 0) {
        throw ParseError(source, j.line, "joint '" + j.raw.name +
                                              "' references unknown link '" + *l + "'");
      }
    }
    if (!by_parent.emplace(j.parent, &j).second) {
      throw UnsupportedTopologyError("link '" + j.parent +
                                     "' has more than one child joint; only serial chains are supported");
    }
    if (!children.insert(j.child).second) {
      throw UnsupportedTopologyError("link '" + j.child + "' has more than one parent joint");
    }

    if (j.type == "revolute" || j.type == "continuous") {
      j.raw.kind = JointKind::Revolute;
      if (j.type == "continuous") {
        j.raw.lower = -std::numeric_limits<double>::infinity();
        j.raw.upper = std::numeric_limits<double>::infinity();
      } else if (!j.has_limit || !(j.raw.lower < j.raw.upper)) {
        throw ParseError(source, j.line, "revolute joint '" + j.raw.name +
                                              "' needs <limit lower upper> with lower < upper");
      }
    } else if (j.type == "fixed") {
      j.raw.kind = JointKind::Fixed;
    } else if (j.type == "prismatic" || j.type == "planar" || j.type == "floating") {
      if (options.reject_unsupported_joints) {
        throw UnsupportedTopologyError(j.type + " joint '" + j.raw.name + "' is not supported");
      }
      j.raw.kind = JointKind::Skipped;
      out.warnings.push_back(j.type + " joint '" + j.raw.name + "' treated as fixed");
    } else {
      throw ParseError(source, j.line, "unknown joint type '" + j.type + "'");
    }
  }

  std::vector<std::string> roots;
  for (const std::string& l : st.links) {
    if (children.count(l) == 0) roots.push_back(l);
  }
  if (roots.size() != 1) {
    throw UnsupportedTopologyError("expected one root link, found " +
                                   std::to_string(roots.size()));
  }

  std::vector<RawJoint> ordered;
  std::string link = roots.front();
  for (auto it = by_parent.find(link); it != by_parent.end();
       it = by_parent.find(link)) {
    ordered.push_back(it->second->raw);
    link = it->second->child;
  }
  out.chain = Fold(ordered, Pose::identity());
  if (out.chain.joints.empty()) throw ParseError(source, 0, "chain has no revolute joint");
  return out;
}

// ---------------------------------------------------------------------------
// Native line format

struct NativeLine {
  std::vector<std::string> tokens;
  std::size_t line = 0;
};

class NativeParser {
 public:
  NativeParser(const std::string& source, NativeLine line)
      : source_(source), l_(std::move(line)) {}

  [[noreturn]] void Fail(const std::string& what) const {
    throw ParseError(source_, l_.line, what);
  }

  // Reads `key v v v` groups starting at pos.
  void Parse(std::size_t pos, std::map<std::string, std::vector<double>>& out,
             const std::map<std::string, std::size_t>& arity) const {
    while (pos < l_.tokens.size()) {
      const std::string& key = l_.tokens[pos];
      auto a = arity.find(key);
      if (a == arity.end()) Fail("unexpected token '" + key + "'");
      if (out.count(key) != 0) Fail("'" + key + "' given twice");
      if (pos + a->second >= l_.tokens.size()) {
        Fail("'" + key + "' needs " + std::to_string(a->second) + " values");
      }
      std::vector<double> vals;
      for (std::size_t k = 1; k <= a->second; ++k) {
        auto v = ToReal(l_.tokens[pos + k]);
        if (!v) Fail("bad number '" + l_.tokens[pos + k] + "' after '" + key + "'");
        vals.push_back(*v);
      }
      out[key] = std::move(vals);
      pos += a->second + 1;
    }
  }

  Pose Origin(const std::map<std::string, std::vector<double>>& g) const {
    Pose p;
    if (auto it = g.find("xyz"); it != g.end()) {
      p.position = Vec3(it->second[0], it->second[1], it->second[2]);
    }
    if (auto it = g.find("rpy"); it != g.end()) {
      p.orientation = UnitQuaternion::from_rpy(it->second[0], it->second[1], it->second[2]);
    }
    return p;
  }

  const NativeLine& line() const { return l_; }

 private:
  const std::string& source_;
  NativeLine l_;
};

ParsedChain ParseNative(std::string_view text, const std::string& source) {
  std::vector<RawJoint> raw;
  std::optional<Pose> tool;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    NativeLine nl;
    nl.line = number;
    for (std::string tok; ls >> tok;) nl.tokens.push_back(tok);
    if (nl.tokens.empty()) continue;
    const NativeParser p(source, nl);
    const std::string& head = nl.tokens.front();
    std::map<std::string, std::vector<double>> g;

    if (tool) p.Fail("statements after 'tool' are not allowed");
    if (head == "joint") {
      if (nl.tokens.size() < 2) p.Fail("joint needs a name");
      p.Parse(2, g, {{"xyz", 3}, {"rpy", 3}, {"axis", 3}, {"limit", 2}});
      if (g.count("axis") == 0) p.Fail("joint '" + nl.tokens[1] + "' needs 'axis'");
      if (g.count("limit") == 0) p.Fail("joint '" + nl.tokens[1] + "' needs 'limit'");
      RawJoint j;
      j.name = nl.tokens[1];
      j.kind = JointKind::Revolute;
      j.origin = p.Origin(g);
      const auto& a = g["axis"];
      j.axis = UnitAxis(Vec3(a[0], a[1], a[2]), source, number);
      j.lower = g["limit"][0];
      j.upper = g["limit"][1];
      if (!(j.lower < j.upper)) p.Fail("limit lower must be < upper");
      raw.push_back(std::move(j));
    } else if (head == "fixed") {
      p.Parse(1, g, {{"xyz", 3}, {"rpy", 3}});
      RawJoint j;
      j.kind = JointKind::Fixed;
      j.origin = p.Origin(g);
      raw.push_back(std::move(j));
    } else if (head == "tool") {
      p.Parse(1, g, {{"xyz", 3}, {"rpy", 3}});
      tool = p.Origin(g);
    } else {
      p.Fail("unknown statement '" + head + "'");
    }
  }
  ParsedChain out;
  out.chain = Fold(raw, tool.value_or(Pose::identity()));
  if (out.chain.joints.empty()) throw ParseError(source, 0, "chain has no joint");
  return out;
}

bool LooksLikeXml(std::string_view text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string_view::npos && text[pos] == '<';
}

}  // namespace

ParsedChain parse_chain(std::string_view text, ChainFormat format,
                        const ChainParseOptions& options,
                        const std::string& source) {
  if (format == ChainFormat::Auto) {
    format = LooksLikeXml(text) ? ChainFormat::Urdf : ChainFormat::Native;
  }
  ParsedChain out = format == ChainFormat::Urdf ? ParseUrdf(text, options, source)
                                                : ParseNative(text, source);
  out.chain.validate();
  return out;
}

ParsedChain load_chain(const std::filesystem::path& path, ChainFormat format,
                       const ChainParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open chain file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (format == ChainFormat::Auto) {
    const auto ext = path.extension().string();
    if (ext == ".urdf" || ext == ".xml") format = ChainFormat::Urdf;
  }
  return parse_chain(buf.str(), format, options, path.string());
}

}  // namespace demotraj
