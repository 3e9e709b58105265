#pragma once

// Textual TM language: dotted paths for containment and flow, "-->" for
// triggering. One statement per line; '#' starts a comment line.
//
//   Flow.Marble.create.release.transfer.Phydias.transfer.receive.
//   Rooster.sound.create-->Sun.rising.create.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "thimac/core_model.hpp"

namespace thimac {

struct SourceSpan {
  std::size_t statement = 0;
  std::size_t begin = 0;  // byte offsets into the whole input
  std::size_t end = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourceSpan span)
      : Error(Errc::ParseError, "statement " + std::to_string(span.statement) + " [" +
                                    std::to_string(span.begin) + ".." + std::to_string(span.end) +
                                    "]: " + message),
        span_(span) {}

  const SourceSpan& span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

enum class SegmentKind { Name, Keyword, Direction };

struct Segment {
  std::string text;
  SegmentKind kind = SegmentKind::Name;
  SourceSpan span;
};

struct Path {
  std::vector<Segment> segments;
};

/// A flow statement has one side; a trigger statement joins two or more
/// sides with "-->".
struct Statement {
  bool flow_header = false;
  std::vector<Path> sides;
  SourceSpan span;

  bool is_trigger() const { return sides.size() > 1; }
};

struct TmDocument {
  std::vector<Statement> statements;
};

struct ParseResult {
  TmDocument document;
  StaticModel model;
};

namespace detail {

inline bool is_name_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c >= 0x80;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

inline bool is_reserved_word(std::string_view word) {
  return stage_kind_from_keyword(word) || direction_from_keyword(word) || name_key(word) == "flow";
}

// Offset of the first byte that breaks UTF-8 well-formedness, if any.
inline std::optional<std::size_t> invalid_utf8_at(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    if (c < 0x80) len = 1;
    else if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
    else return i;
    if (i + len > text.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) return i;
    }
    if (len == 3) {
      const auto c1 = static_cast<unsigned char>(text[i + 1]);
      if ((c == 0xE0 && c1 < 0xA0) || (c == 0xED && c1 >= 0xA0)) return i;
    }
    if (len == 4) {
      const auto c1 = static_cast<unsigned char>(text[i + 1]);
      if ((c == 0xF0 && c1 < 0x90) || (c == 0xF4 && c1 >= 0x90)) return i;
    }
    i += len;
  }
  return std::nullopt;
}

// Where a path begins and ends in the model.
struct PathEnds {
  std::optional<StageId> first;
  std::optional<StageId> last;
  bool ends_in_name = false;
};

class ModelBuilder {
 public:
  explicit ModelBuilder(StaticModel& model) : model_(model) {}

  template <class F>
  auto guarded(const SourceSpan& at, F&& f) {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), at);
    }
  }

  ThimacId thimac(std::string_view name, std::optional<ThimacId> parent, const SourceSpan& at) {
    if (auto found = model_.find_thimac(parent, name)) return *found;
    return guarded(at, [&] { return model_.add_thimac(std::string(name), parent); });
  }

  StageId stage(ThimacId owner, StageKind kind, std::optional<Direction> dir,
                const SourceSpan& at) {
    if (auto found = model_.find_stage(owner, kind, dir)) return *found;
    return guarded(at, [&] { return model_.add_stage(owner, kind, dir); });
  }

  void flow(StageId from, StageId to, const SourceSpan& at) {
    if (model_.find_arc(ArcKind::Flow, from, to)) return;
    guarded(at, [&] { return model_.add_flow(from, to); });
  }

  void trigger(StageId from, StageId to, const SourceSpan& at) {
    if (model_.find_arc(ArcKind::Trigger, from, to)) return;
    guarded(at, [&] { return model_.add_trigger(from, to); });
  }

  const StaticModel& model() const { return model_; }

 private:
  StaticModel& model_;
};

// Walks one side of a statement, creating thimacs, stages and flow arcs.
//   Name Name          containment
//   Name keyword       stage of that thimac
//   keyword keyword    flow inside the current thimac
//   transfer Name      flow handed over to the named thimac's transfer
//   transfer input|output   direction of that transfer
//   receive arrive|accept   receive refined into its sub-stage
inline PathEnds build_path(ModelBuilder& b, const std::vector<Segment>& segs) {
  PathEnds ends;
  std::optional<ThimacId> named;  // thimac selected by the trailing run of names
  std::optional<StageId> stage;   // stage the thing currently occupies

  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& seg = segs[i];
    if (seg.kind == SegmentKind::Direction) {
      throw ParseError("'" + seg.text + "' must follow transfer", seg.span);
    }
    if (seg.kind == SegmentKind::Name) {
      if (name_key(seg.text) == "flow") {
        throw ParseError("'Flow' is only allowed as a statement header", seg.span);
      }
      if (named) {
        named = b.thimac(seg.text, named, seg.span);
      } else if (stage) {
        if (b.model().stage(*stage).kind != StageKind::Transfer) {
          throw ParseError("only a transfer stage can hand a thing to '" + seg.text + "'",
                           seg.span);
        }
        named = b.thimac(seg.text, std::nullopt, seg.span);
      } else {
        named = b.thimac(seg.text, std::nullopt, seg.span);
      }
      continue;
    }

    const StageKind kind = *stage_kind_from_keyword(seg.text);
    if (kind == StageKind::Receive && i + 1 < segs.size() &&
        segs[i + 1].kind == SegmentKind::Keyword) {
      const StageKind next = *stage_kind_from_keyword(segs[i + 1].text);
      if (next == StageKind::Arrive || next == StageKind::Accept) continue;
    }

    ThimacId owner;
    if (named) {
      owner = *named;
    } else if (stage) {
      owner = b.model().stage(*stage).owner;
    } else {
      owner = b.thimac("", std::nullopt, seg.span);
    }

    std::optional<Direction> dir;
    SourceSpan span = seg.span;
    if (kind == StageKind::Transfer && i + 1 < segs.size() &&
        segs[i + 1].kind == SegmentKind::Direction) {
      dir = direction_from_keyword(segs[i + 1].text);
      span.end = segs[i + 1].span.end;
      ++i;
    }

    const StageId sid = b.stage(owner, kind, dir, span);
    if (stage) b.flow(*stage, sid, span);
    stage = sid;
    if (!ends.first) ends.first = sid;
    named.reset();
  }

  if (named) {
    ends.ends_in_name = true;
    if (stage) {
      const StageId sid = b.stage(*named, StageKind::Transfer, std::nullopt, segs.back().span);
      b.flow(*stage, sid, segs.back().span);
      stage = sid;
    }
  }
  ends.last = stage;
  return ends;
}

// Splits `side` (located at `offset` in the input) into classified segments.
inline Path lex_path(std::string_view side, std::size_t offset, std::size_t statement) {
  Path path;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = side.find('.', start);
    const std::size_t stop = dot == std::string_view::npos ? side.size() : dot;
    const std::string_view tok = side.substr(start, stop - start);
    const SourceSpan span{statement, offset + start, offset + stop};
    if (tok.empty()) throw ParseError("dangling dot", span);
    for (char c : tok) {
      if (!is_name_byte(static_cast<unsigned char>(c))) {
        throw ParseError("unknown token '" + std::string(tok) + "'", span);
      }
    }
    SegmentKind kind = SegmentKind::Name;
    if (stage_kind_from_keyword(tok)) kind = SegmentKind::Keyword;
    else if (direction_from_keyword(tok)) kind = SegmentKind::Direction;
    path.segments.push_back(Segment{std::string(tok), kind, span});
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return path;
}

}  // namespace detail

/// Parses TM-language text into its statement structure and the merged
/// static model. Repeated mentions of a thimac or stage unify; every failure
/// is a ParseError carrying the offending span.
inline ParseResult parse(std::string_view text) {
  if (auto bad = detail::invalid_utf8_at(text)) {
    throw ParseError("input is not valid UTF-8", SourceSpan{0, *bad, *bad + 1});
  }

  ParseResult result;
  detail::ModelBuilder builder(result.model);
  std::size_t statement = 0;
  std::size_t line_start = 0;

  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();

    std::size_t b = line_start;
    std::size_t e = line_end;
    while (b < e && detail::is_space(text[b])) ++b;
    while (e > b && detail::is_space(text[e - 1])) --e;

    if (b < e && text[b] != '#') {
      const SourceSpan whole{statement, b, e};
      // Trailing decoration: one '.', one '*', in either order.
      bool dot_stripped = false;
      if (text[e - 1] == '.') {
        --e;
        dot_stripped = true;
      }
      if (e > b && text[e - 1] == '*') --e;
      if (!dot_stripped && e > b && text[e - 1] == '.') --e;
      while (e > b && detail::is_space(text[e - 1])) --e;
      if (b == e) throw ParseError("empty statement", whole);

      Statement st;
      st.span = whole;
      const std::string_view body = text.substr(b, e - b);
      std::size_t side_start = 0;
      while (true) {
        const std::size_t arrow = body.find("-->", side_start);
        const std::size_t side_stop = arrow == std::string_view::npos ? body.size() : arrow;
        std::size_t sb = side_start;
        std::size_t se = side_stop;
        while (sb < se && detail::is_space(body[sb])) ++sb;
        while (se > sb && detail::is_space(body[se - 1])) --se;
        if (sb == se) {
          throw ParseError("empty path side of '-->'",
                           SourceSpan{statement, b + side_start, b + side_stop});
        }
        st.sides.push_back(detail::lex_path(body.substr(sb, se - sb), b + sb, statement));
        if (arrow == std::string_view::npos) break;
        side_start = arrow + 3;
      }

      auto& head = st.sides.front().segments;
      if (head.size() > 1 && head.front().kind == SegmentKind::Name &&
          name_key(head.front().text) == "flow") {
        st.flow_header = true;
        head.erase(head.begin());
      }

      std::vector<detail::PathEnds> ends;
      for (const Path& side : st.sides) ends.push_back(detail::build_path(builder, side.segments));

      if (st.is_trigger()) {
        for (std::size_t k = 0; k < st.sides.size(); ++k) {
          if (ends[k].ends_in_name) {
            throw ParseError("a trigger must be anchored at a stage, not a thimac",
                             st.sides[k].segments.back().span);
          }
        }
        for (std::size_t k = 0; k + 1 < st.sides.size(); ++k) {
          builder.trigger(*ends[k].last, *ends[k + 1].first, whole);
        }
      }
      result.document.statements.push_back(std::move(st));
      ++statement;
    }

    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }
  return result;
}

namespace detail {

inline std::string stage_token(const Stage& s) {
  std::string out(to_string(s.kind));
  if (s.direction) {
    out += '.';
    out += to_string(*s.direction);
  }
  return out;
}

inline void require_writable(const StaticModel& model) {
  for (const Thimac& t : model.thimacs()) {
    if (t.name.empty()) {
      if (t.parent) throw Error(Errc::InvalidModel, "only a root thimac may be anonymous");
      if (!model.children(t.id).empty()) {
        throw Error(Errc::InvalidModel, "the anonymous thimac cannot contain thimacs");
      }
      continue;
    }
    const bool ok = std::all_of(t.name.begin(), t.name.end(),
                                [](char c) { return is_name_byte(static_cast<unsigned char>(c)); });
    if (!ok || is_reserved_word(t.name)) {
      throw Error(Errc::InvalidModel, "thimac name '" + t.name + "' cannot be written as a TM token");
    }
  }
}

}  // namespace detail

/// Emits canonical TM text: one "Flow." statement per maximal flow trail,
/// one statement per trigger arc, one statement per otherwise unmentioned
/// stage or leaf thimac; statements sorted and newline-joined, each ending
/// in '.'. Ordering depends only on names, so re-serializing a re-parsed
/// model reproduces the same text.
inline std::string serialize(const StaticModel& model) {
  if (has_errors(validate_model(model))) {
    throw Error(Errc::InvalidModel, "model has validation errors");
  }
  detail::require_writable(model);

  std::vector<std::string> statements;
  std::set<std::uint32_t> mentioned_stages;

  // Flow arcs, deduplicated, keyed by their endpoint paths.
  using Key = std::pair<std::string, std::string>;
  std::map<Key, const Arc*> flows;
  for (const Arc& a : model.arcs()) {
    if (a.kind != ArcKind::Flow) continue;
    flows.try_emplace(Key{stage_path(model, a.from), stage_path(model, a.to)}, &a);
  }
  std::map<std::uint32_t, int> unused_in;
  for (const auto& [key, arc] : flows) ++unused_in[arc->to.value];

  std::set<Key> unused;
  for (const auto& [key, arc] : flows) unused.insert(key);

  while (!unused.empty()) {
    auto start = std::find_if(unused.begin(), unused.end(), [&](const Key& k) {
      return unused_in[flows.at(k)->from.value] == 0;
    });
    if (start == unused.end()) start = unused.begin();

    const Arc* arc = flows.at(*start);
    const Stage* prev = &model.stage(arc->from);
    std::string text = "Flow." + stage_path(model, arc->from);
    mentioned_stages.insert(arc->from.value);

    Key key = *start;
    while (true) {
      unused.erase(key);
      --unused_in[arc->to.value];
      const Stage& cur = model.stage(arc->to);
      mentioned_stages.insert(cur.id.value);
      if (cur.owner == prev->owner) {
        text += "." + detail::stage_token(cur);
      } else {
        const std::string owner = thimac_path(model, cur.owner);
        if (owner.empty()) {
          throw Error(Errc::InvalidModel, "flow into the anonymous thimac cannot be written");
        }
        text += "." + owner + "." + detail::stage_token(cur);
      }
      prev = &cur;

      // Continue along the smallest unused outgoing arc.
      const std::string here = stage_path(model, cur.id);
      auto next = unused.lower_bound(Key{here, std::string()});
      if (next == unused.end() || next->first != here) break;
      key = *next;
      arc = flows.at(key);
    }
    statements.push_back(text + ".");
  }

  std::set<std::string> triggers;
  for (const Arc& a : model.arcs()) {
    if (a.kind != ArcKind::Trigger) continue;
    mentioned_stages.insert(a.from.value);
    mentioned_stages.insert(a.to.value);
    triggers.insert(stage_path(model, a.from) + "-->" + stage_path(model, a.to) + ".");
  }
  statements.insert(statements.end(), triggers.begin(), triggers.end());

  for (const Stage& s : model.stages()) {
    if (!mentioned_stages.count(s.id.value)) statements.push_back("Flow." + stage_path(model, s.id) + ".");
  }
  for (const Thimac& t : model.thimacs()) {
    if (t.stages.empty() && model.children(t.id).empty() && !t.name.empty()) {
      statements.push_back("Flow." + thimac_path(model, t.id) + ".");
    }
  }

  std::sort(statements.begin(), statements.end());
  std::string out;
  for (const std::string& s : statements) {
    if (!out.empty()) out += '\n';
    out += s;
  }
  return out;
}

}  // namespace thimac
