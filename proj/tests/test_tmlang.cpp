#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace thimac;
using thimac::testing::canonical_form;

namespace {

// Reference corpus of TM-language strings.
const std::vector<std::string> kFlowStrings = {
    "Flow.Create.release.transfer.output*",
    "Flow.Create.process.release.transfer.output*",
    "Flow.Transfer.input.receive.arrive.release.transfer.output*",
    "Flow.Transfer.input.receive.arrive.accept.release.transfer.output*",
    "Flow.Transfer.input.receive.arrive.accept.process.release.transfer.output*",
};
const std::vector<std::string> kApolloStrings = {
    "Flow.Marble.create.release.transfer.Phydias.transfer.receive.transfer.workshop.",
    "Flow.Apollo.image.create.release.transfer.Phydias.transfer.receive.release.transfer.workshop.",
    "Flow.Workshop.transfer.receive.process--> Apollo.temple.statue.create.process.",
};
const std::vector<std::string> kTriggerStrings = {
    "Rooster.sound.create.release.transfer.sun.transfer.receive.process-->Rising.create.",
    "Rooster.sound.create-->Sun.rising.create.",
    "Flame.create-->Flame.heat.create.",
    "Flame.create-->Heat.create.",
};

std::size_t count_arcs(const StaticModel& m, ArcKind kind) {
  std::size_t n = 0;
  for (const Arc& a : m.arcs()) n += a.kind == kind;
  return n;
}

SourceSpan span_of(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.span();
  }
  ADD_FAILURE() << "expected a ParseError for: " << text;
  return {};
}

}  // namespace

TEST(ParseCorpus, AllCorpusStringsParseAndRoundTrip) {
  std::vector<std::string> all = kFlowStrings;
  all.insert(all.end(), kApolloStrings.begin(), kApolloStrings.end());
  all.insert(all.end(), kTriggerStrings.begin(), kTriggerStrings.end());
  for (const std::string& s : all) {
    SCOPED_TRACE(s);
    const StaticModel m = parse(s).model;
    EXPECT_FALSE(has_errors(validate_model(m)));
    const std::string once = serialize(m);
    const StaticModel back = parse(once).model;
    EXPECT_EQ(canonical_form(back), canonical_form(m));
    EXPECT_EQ(serialize(back), once);
  }
}

TEST(ParseCorpus, ApolloStringsMergeIntoOneModel) {
  std::string text;
  for (const auto& s : kApolloStrings) text += s + "\n";
  const StaticModel m = parse(text).model;
  EXPECT_FALSE(has_errors(validate_model(m)));
  // Workshop and workshop are one thimac.
  std::size_t workshops = 0;
  for (const Thimac& t : m.thimacs()) workshops += name_key(t.name) == "workshop";
  EXPECT_EQ(workshops, 1u);
  const auto statue = resolve_stage_path(m, "Apollo.temple.statue.create");
  const auto process = resolve_stage_path(m, "Workshop.process");
  EXPECT_TRUE(m.find_arc(ArcKind::Trigger, process, statue));
  EXPECT_EQ(canonical_form(parse(serialize(m)).model), canonical_form(m));
}

TEST(ParseCorpus, TriggerStringsHaveExactlyOneTrigger) {
  for (const std::string& s : kTriggerStrings) {
    EXPECT_EQ(count_arcs(parse(s).model, ArcKind::Trigger), 1u) << s;
  }
}

TEST(Parse, AnonymousContextChain) {
  const ParseResult r = parse("Flow.Create.process.release.transfer.output");
  const StaticModel& m = r.model;
  ASSERT_EQ(m.thimacs().size(), 1u);
  EXPECT_EQ(m.thimacs()[0].name, "");
  ASSERT_EQ(m.stages().size(), 4u);
  EXPECT_EQ(m.stages()[0].kind, StageKind::Create);
  EXPECT_EQ(m.stages()[1].kind, StageKind::Process);
  EXPECT_EQ(m.stages()[2].kind, StageKind::Release);
  EXPECT_EQ(m.stages()[3].kind, StageKind::Transfer);
  EXPECT_EQ(m.stages()[3].direction, Direction::Output);
  EXPECT_EQ(count_arcs(m, ArcKind::Flow), 3u);
  ASSERT_EQ(r.document.statements.size(), 1u);
  EXPECT_TRUE(r.document.statements[0].flow_header);
  EXPECT_FALSE(r.document.statements[0].is_trigger());
}

TEST(Parse, RoosterTrigger) {
  const ParseResult r = parse("Rooster.sound.create-->Sun.rising.create.");
  const StaticModel& m = r.model;
  const auto from = resolve_stage_path(m, "Rooster.sound.create");
  const auto to = resolve_stage_path(m, "Sun.rising.create");
  ASSERT_EQ(m.arcs().size(), 1u);
  EXPECT_EQ(m.arcs()[0], (Arc{ArcId{0}, ArcKind::Trigger, from, to}));
  EXPECT_FALSE(r.document.statements[0].flow_header);
  EXPECT_TRUE(r.document.statements[0].is_trigger());
}

TEST(Parse, MarbleHandOverChain) {
  const StaticModel m = parse(kApolloStrings[0]).model;
  const auto rel = resolve_stage_path(m, "Marble.release");
  const auto out = resolve_stage_path(m, "Marble.transfer");
  const auto ph = resolve_stage_path(m, "Phydias.transfer");
  const auto rc = resolve_stage_path(m, "Phydias.receive");
  const auto ws = resolve_stage_path(m, "workshop.transfer");
  EXPECT_TRUE(m.find_arc(ArcKind::Flow, rel, out));
  EXPECT_TRUE(m.find_arc(ArcKind::Flow, out, ph));
  EXPECT_TRUE(m.find_arc(ArcKind::Flow, ph, rc));
  EXPECT_TRUE(m.find_arc(ArcKind::Flow, rc, ph));
  EXPECT_TRUE(m.find_arc(ArcKind::Flow, ph, ws));
}

TEST(Parse, ReceiveRefinementCreatesOnlySubStages) {
  const StaticModel m = parse(kFlowStrings[3]).model;
  for (const Stage& s : m.stages()) EXPECT_NE(s.kind, StageKind::Receive);
  EXPECT_NO_THROW(resolve_stage_path(m, "arrive"));
  EXPECT_NO_THROW(resolve_stage_path(m, "accept"));
}

TEST(Parse, TriggerTargetIsFirstStageOfRightSide) {
  const StaticModel m = parse(kApolloStrings[2]).model;
  const auto process = resolve_stage_path(m, "Workshop.process");
  EXPECT_TRUE(m.find_arc(ArcKind::Trigger, process, resolve_stage_path(m, "Apollo.temple.statue.create")));
  EXPECT_EQ(count_arcs(m, ArcKind::Trigger), 1u);
}

TEST(Parse, UnificationAcrossStatements) {
  const StaticModel m = parse("Flow.A.create.process.\nA.process-->B.create.\nFlow.B.create.release.").model;
  EXPECT_EQ(m.thimacs().size(), 2u);
  EXPECT_EQ(m.stages().size(), 4u);
  EXPECT_EQ(m.arcs().size(), 3u);
}

TEST(Parse, RepeatedStatementsDoNotDuplicateArcs) {
  const StaticModel m = parse("Flame.create-->Flame.heat.create.\nFlame.create-->Flame.heat.create.").model;
  EXPECT_EQ(m.arcs().size(), 1u);
}

TEST(Parse, CommentsAndBlankLines) {
  const ParseResult r = parse("# comment\n\n   \nFlame.create-->Flame.heat.create.\n");
  EXPECT_EQ(r.document.statements.size(), 1u);
}

TEST(Parse, EmptyInput) {
  const ParseResult r = parse("");
  EXPECT_TRUE(r.model.empty());
  EXPECT_TRUE(r.document.statements.empty());
}

TEST(ParseErrors, SpansPointAtTheProblem) {
  EXPECT_EQ(span_of("A.create..process"), (SourceSpan{0, 9, 9}));
  EXPECT_EQ(span_of("A.cre-ate"), (SourceSpan{0, 2, 9}));
  EXPECT_EQ(span_of("A.create--> ").statement, 0u);
  const SourceSpan s = span_of("Flame.create.\n-->B.create.");
  EXPECT_EQ(s.statement, 1u);
  EXPECT_LE(s.begin, s.end);
}

TEST(ParseErrors, Kinds) {
  for (const char* bad : {
           "A.create..process",        // dangling dot
           ".A.create",                // leading dot
           "A.cre$ate",                // unknown token
           "A.create-->",              // empty trigger side
           "-->A.create",              // empty trigger side
           "A.create-->B",             // trigger ending in a thimac
           "A-->B.create",             // trigger starting at a thimac
           "A.create.input",           // direction not after transfer
           "A.create.B",               // hand-over from a non-transfer stage
           "A.Flow.create",            // Flow header in the middle
           "A.process.create",         // illegal flow pair
           "A.receive.arrive.\nA.receive.process.",  // mixed refinement
       }) {
    try {
      parse(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.code(), Errc::ParseError);
      EXPECT_LE(e.span().begin, e.span().end);
    }
  }
}

TEST(ParseErrors, InvalidUtf8) {
  EXPECT_THROW(parse(std::string("A.create\xff")), ParseError);
  EXPECT_NO_THROW(parse("Caf\xc3\xa9.create."));
}

TEST(Serialize, FlameIsExact) {
  EXPECT_EQ(serialize(parse("Flame.create-->Flame.heat.create.").model), "Flame.create-->Flame.heat.create.");
}

TEST(Serialize, EmptyModel) { EXPECT_EQ(serialize(StaticModel{}), ""); }

TEST(Serialize, GrassRoundTrip) {
  const StaticModel m = parse(thimac::testing::read_text(thimac::testing::fixture_path("grass/model.tm"))).model;
  EXPECT_EQ(serialize(m),
            "Bottle.process-->Grass.wet.create.\n"
            "Flow.Bottle.create.process.\n"
            "Flow.Rain.create.release.transfer.Grass.transfer.receive.process.\n"
            "Grass.process-->Grass.wet.create.");
  EXPECT_EQ(canonical_form(parse(serialize(m)).model), canonical_form(m));
}

TEST(Serialize, StagelessThimacsSurvive) {
  StaticModel m;
  const auto a = m.add_thimac("Apollo");
  m.add_thimac("temple", a);
  m.add_thimac("Phydias");
  EXPECT_EQ(serialize(m), "Flow.Apollo.temple.\nFlow.Phydias.");
  EXPECT_EQ(canonical_form(parse(serialize(m)).model), canonical_form(m));
}

TEST(Serialize, RejectsInvalidModels) {
  const StaticModel bad = StaticModel::from_parts(
      {Thimac{ThimacId{0}, "T", {}, {}}},
      {Stage{StageId{0}, ThimacId{0}, StageKind::Process, {}}, Stage{StageId{1}, ThimacId{0}, StageKind::Create, {}}},
      {Arc{ArcId{0}, ArcKind::Flow, StageId{0}, StageId{1}}});
  EXPECT_THROW(serialize(bad), Error);
  StaticModel reserved;
  reserved.add_thimac("process");
  try {
    serialize(reserved);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidModel);
  }
}

TEST(SerializeProperty, RandomModelsRoundTrip) {
  std::mt19937 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const StaticModel m = thimac::testing::random_model(rng, 1 + i % 5, 3 + i % 15);
    const std::string text = serialize(m);
    SCOPED_TRACE(text);
    const StaticModel back = parse(text).model;
    ASSERT_EQ(canonical_form(back), canonical_form(m)) << "instance " << i;
    EXPECT_EQ(serialize(back), text);
  }
}

TEST(ParseProperty, TotalOnRandomInput) {
  std::mt19937 rng(99);
  const std::vector<std::string> pieces = {"Flow", "A", "b", "create", "process", "release", "transfer",
                                           "receive", "arrive", "accept", "input", "output", ".", ".",
                                           "-->", "*", " ", "\n", "#", "x-y", "\xc3\xa9", "\xff"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1), len(0, 14);
  for (int i = 0; i < 3000; ++i) {
    std::string text;
    const std::size_t n = len(rng);
    for (std::size_t k = 0; k < n; ++k) text += pieces[pick(rng)];
    try {
      const ParseResult r = parse(text);
      EXPECT_FALSE(has_errors(validate_model(r.model))) << text;
    } catch (const ParseError& e) {
      EXPECT_LE(e.span().begin, e.span().end);
      EXPECT_LE(e.span().end, text.size() + 1);
    }
  }
}
