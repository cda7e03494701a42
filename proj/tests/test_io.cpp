#include <gtest/gtest.h>

#include "qrst/io.hpp"

using namespace qrst;

namespace {

int parse_error_line(std::string_view text) {
  try {
    parse_instance(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(ParseInstance, TwoCycle) {
  Instance inst = parse_instance("RST pedestal\nn 2 m 2\narc 0 1\narc 1 0\nR 0 1\nT\n");
  EXPECT_EQ(inst.variant, Variant::pedestal);
  EXPECT_EQ(inst.graph.size(), 2);
  EXPECT_EQ(inst.graph.arc_count(), 2);
  EXPECT_EQ(inst.roots, (VertexSet{0, 1}));
  EXPECT_TRUE(inst.terminals.empty());
  EXPECT_FALSE(inst.budget);
}

TEST(ParseInstance, CommentsBudgetAndUnsortedIds) {
  Instance inst = parse_instance("# header comment\nRST trunk\n\nn 4 m 1  # one arc\narc 2 3\nR 1 0\nT 3 2\nk 4\n");
  EXPECT_EQ(inst.variant, Variant::trunk);
  EXPECT_EQ(inst.roots, (VertexSet{0, 1}));
  EXPECT_EQ(inst.terminals, (VertexSet{2, 3}));
  EXPECT_EQ(inst.budget, 4);
}

TEST(ParseInstance, ArcOutOfRangeNamesLine) {
  EXPECT_EQ(parse_error_line("RST pedestal\nn 2 m 1\narc 0 2\nR 0\nT 1\n"), 3);
}

TEST(ParseInstance, ErrorLines) {
  EXPECT_EQ(parse_error_line("RST nonsense\n"), 1);
  EXPECT_EQ(parse_error_line("RST pedestal\nn 2\n"), 2);
  EXPECT_EQ(parse_error_line("RST pedestal\nn 2 m 2\narc 0 1\nR 0\nT 1\n"), 4);
  EXPECT_EQ(parse_error_line("RST pedestal\nn 3 m 0\nR 0 0\nT 1\n"), 3);
  EXPECT_EQ(parse_error_line("RST pedestal\nn 3 m 0\nR 0 1\nT 1 2\n"), 4);
  EXPECT_EQ(parse_error_line("RST pedestal\nn 3 m 0\nR\nT 1\n"), 3);
  EXPECT_EQ(parse_error_line("RST pedestal\nn 3 m 0\nR 0\nT 1\nk x\n"), 5);
  EXPECT_EQ(parse_error_line("RST pedestal\nn 3 m 0\nR 0\nT 1\nextra\n"), 5);
  EXPECT_EQ(parse_error_line("RST pedestal\nn 3 m 1\narc 0 1x\nR 0\nT 1\n"), 3);
}

TEST(ParseInstance, OverlapAllowedOutsidePedestal) {
  Instance inst = parse_instance("RST trunk\nn 3 m 0\nR 0 1\nT 1 2\n");
  EXPECT_EQ(set_intersection(inst.roots, inst.terminals), (VertexSet{1}));
}

TEST(ParseInstance, LoopsAndDuplicatesAreDropped) {
  Instance inst = parse_instance("RST pedestal\nn 2 m 3\narc 0 1\narc 0 1\narc 1 1\nR 0\nT 1\n");
  EXPECT_EQ(inst.graph.arc_count(), 1);
}

TEST(RenderInstance, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Instance inst = gen_random({9, 0.3, 2, 3, seed, static_cast<Variant>(seed % 3)});
    if (seed % 2) inst.budget = static_cast<int>(seed);
    EXPECT_EQ(parse_instance(render_instance(inst)), inst);
  }
}

TEST(GenRandom, ArcCountExtremes) {
  EXPECT_EQ(gen_random({5, 0.0, 2, 1, 7}).graph.arc_count(), 0);
  EXPECT_EQ(gen_random({5, 1.0, 2, 1, 7}).graph.arc_count(), 20);
}

TEST(GenRandom, DeterministicAndDisjoint) {
  RandomSpec spec{12, 0.2, 3, 4, 99, Variant::pedestal};
  EXPECT_EQ(render_instance(gen_random(spec)), render_instance(gen_random(spec)));
  Instance inst = gen_random(spec);
  EXPECT_EQ(inst.roots.size(), 3u);
  EXPECT_EQ(inst.terminals.size(), 4u);
  EXPECT_TRUE(set_intersection(inst.roots, inst.terminals).empty());
  spec.seed = 100;
  EXPECT_NE(render_instance(gen_random(spec)), render_instance(inst));
}

// Regression pin: any change to the sampling procedure changes this text.
TEST(GenRandom, GoldenOutput) {
  EXPECT_EQ(render_instance(gen_random({6, 0.5, 2, 2, 2024})),
            "RST pedestal\nn 6 m 14\n"
            "arc 0 3\narc 0 4\narc 0 5\narc 1 0\narc 1 4\narc 2 5\narc 3 0\n"
            "arc 3 1\narc 3 5\narc 4 1\narc 4 2\narc 4 5\narc 5 0\narc 5 4\n"
            "R 1 2\nT 3 4\n");
}

TEST(GenRandom, RejectsBadParameters) {
  EXPECT_THROW(gen_random({3, 0.5, 2, 2, 1}), InvalidArgument);
  EXPECT_THROW(gen_random({3, 1.5, 1, 1, 1}), InvalidArgument);
  EXPECT_THROW(gen_random({3, -0.1, 1, 1, 1}), InvalidArgument);
  EXPECT_THROW(gen_random({3, 0.5, 0, 1, 1}), InvalidArgument);
}

TEST(Psi, ParseRenderRoundTrip) {
  const std::string text = "PSI\nH 3 2\nedge 0 1\n1 2\nG 2 1\nedge 0 1\ncol 0 1 0\n";
  PsiInstance psi = parse_psi(text);
  EXPECT_EQ(psi.host.n, 3);
  EXPECT_EQ(psi.host.edges.size(), 2u);
  EXPECT_EQ(psi.color, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(parse_psi(render_psi(psi)), psi);
}

TEST(Psi, ParseErrors) {
  EXPECT_THROW(parse_psi("PSI\nH 2 1\nedge 0 1\nG 2 1\nedge 0 1\ncol 0\n"), ParseError);
  EXPECT_THROW(parse_psi("PSI\nH 2 1\nedge 0 1\nG 2 1\nedge 0 1\ncol 0 2\n"), ParseError);
  EXPECT_THROW(parse_psi("PSI\nH 2 1\nG 2 0\ncol 0 1\n"), ParseError);
}
