#include <gtest/gtest.h>

#include <random>

#include "remix/diffpatch.hpp"
#include "remix/error.hpp"
#include "support.hpp"

using namespace remix;
using namespace remix::diffpatch;
using testing_support::random_document;
using testing_support::random_edit;
using testing_support::reference_diff;

namespace {

Error error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error raised";
  return Error(ErrorCode::NotFound, "");
}

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace

TEST(Parse, ReferenceToolOneHunk) {
  const std::string before = "<p>a</p>\n<p>b</p>\n<p>c</p>\n";
  const std::string after = "<p>a</p>\n<p>B</p>\n<p>c</p>\n";
  const auto d = parse_unified_diff(reference_diff(before, after));
  ASSERT_EQ(d.hunks.size(), 1u);
  EXPECT_EQ(d.hunks[0].old_len, 3u);
  EXPECT_EQ(d.hunks[0].new_len, 3u);
  EXPECT_EQ(d.preamble.size(), 2u);
  EXPECT_EQ(apply_patch(before, d).new_document, after);
}

TEST(Parse, EmptyTextHasNoHunks) {
  const auto d = parse_unified_diff("");
  EXPECT_TRUE(d.hunks.empty());
  const auto out = apply_patch("doc\n", d);
  EXPECT_EQ(out.new_document, "doc\n");
  EXPECT_EQ(out.applied_hunks, 0u);
}

TEST(Parse, OmittedLengthMeansOne) {
  const auto d = parse_unified_diff("@@ -2 +2 @@\n-b\n+B\n");
  ASSERT_EQ(d.hunks.size(), 1u);
  EXPECT_EQ(d.hunks[0].old_len, 1u);
  EXPECT_EQ(d.hunks[0].new_len, 1u);
  EXPECT_EQ(apply_patch("a\nb\nc\n", d).new_document, "a\nB\nc\n");
}

TEST(Parse, LineCountMismatch) {
  const auto e = error_of([] { parse_unified_diff("@@ -1,2 +1 @@\n a\n b\n c\n d\n"); });
  EXPECT_EQ(e.code(), ErrorCode::LineCountMismatch);
  ASSERT_TRUE(e.detail().index);
  EXPECT_EQ(*e.detail().index, 0u);
}

TEST(Parse, MalformedHeader) {
  const auto e = error_of([] { parse_unified_diff("--- a\n+++ b\n@@ -x,2 +1,2 @@\n a\n"); });
  EXPECT_EQ(e.code(), ErrorCode::MalformedHeader);
  ASSERT_TRUE(e.detail().index);
  EXPECT_EQ(*e.detail().index, 3u);
}

TEST(Parse, OverlappingHunks) {
  const auto e = error_of([] { parse_unified_diff("@@ -1,3 +1,3 @@\n a\n-b\n+B\n c\n@@ -2,2 +2,2 @@\n-b\n+X\n c\n"); });
  EXPECT_EQ(e.code(), ErrorCode::OverlappingHunks);
}

TEST(Parse, MultiFileRejected) {
  const std::string text =
      "--- a/one.html\n+++ b/one.html\n@@ -1 +1 @@\n-a\n+b\n--- a/two.html\n+++ b/two.html\n@@ -1 +1 @@\n-c\n+d\n";
  EXPECT_EQ(error_of([&] { parse_unified_diff(text); }).code(), ErrorCode::MultiFileUnsupported);
}

TEST(Parse, RenderIsInverse) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 60; ++i) {
    const auto a = random_document(rng, 5 + rng() % 40, rng() % 4 != 0);
    const auto b = random_edit(rng, a);
    const auto d = parse_unified_diff(reference_diff(a, b, static_cast<int>(rng() % 4)));
    EXPECT_EQ(parse_unified_diff(render_unified_diff(d)), d);
  }
}

TEST(Apply, ReferenceDiffRoundTrip) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_document(rng, rng() % 60, rng() % 5 != 0);
    const auto b = random_edit(rng, a);
    const auto text = reference_diff(a, b, static_cast<int>(rng() % 4));
    const auto out = apply_patch(a, parse_unified_diff(text));
    ASSERT_EQ(out.new_document, b) << "pair " << i << "\n" << text;
    for (long off : out.offsets) EXPECT_EQ(off, 0);
  }
}

TEST(Apply, ShiftedContextReportsOffsets) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 40; ++i) {
    auto lines = testing_support::split_lines(random_document(rng, 80));
    const std::string a = join(lines);
    // Edit only below line 30 so removing up to 20 leading lines keeps every hunk.
    auto edited = lines;
    edited[40] = "<p>edited-" + std::to_string(i) + "</p>";
    edited.insert(edited.begin() + 60, "<p>inserted</p>");
    const auto diff = parse_unified_diff(reference_diff(a, join(edited)));

    const long shift = static_cast<long>(rng() % 41) - 20;
    auto shifted = lines;
    auto target = edited;
    if (shift > 0) {
      for (long k = 0; k < shift; ++k) {
        shifted.insert(shifted.begin(), "<p>pad " + std::to_string(k) + "</p>");
        target.insert(target.begin(), "<p>pad " + std::to_string(k) + "</p>");
      }
    } else {
      shifted.erase(shifted.begin(), shifted.begin() - shift);
      target.erase(target.begin(), target.begin() - shift);
    }
    const auto out = apply_patch(join(shifted), diff);
    EXPECT_EQ(out.new_document, join(target));
    ASSERT_EQ(out.offsets.size(), diff.hunks.size());
    for (long off : out.offsets) EXPECT_EQ(off, shift);
  }
}

TEST(Apply, OutsideWindowIsRejected) {
  std::mt19937_64 rng(8);
  auto lines = testing_support::split_lines(random_document(rng, 60));
  auto edited = lines;
  edited[45] = "<p>changed</p>";
  const auto diff = parse_unified_diff(reference_diff(join(lines), join(edited)));
  for (int k = 0; k < 21; ++k) lines.insert(lines.begin(), "<p>pad " + std::to_string(k) + "</p>");
  const auto doc = join(lines);
  const auto e = error_of([&] { apply_patch(doc, diff); });
  EXPECT_EQ(e.code(), ErrorCode::HunkRejected);
  EXPECT_EQ(e.detail().field, "NO_MATCH");
  EXPECT_NO_THROW(apply_patch(doc, diff, 21));
}

TEST(Apply, NonMatchingIsAtomic) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    const auto a = random_document(rng, 30);
    auto lines = testing_support::split_lines(a);
    // First hunk matches, second refers to text that exists nowhere.
    std::string text = testing_support::replace_line_diff(a, 3, "<p>first</p>");
    text += "@@ -20,3 +20,3 @@\n <p>ghost-" + std::to_string(i) + "</p>\n-<p>nope</p>\n+<p>yes</p>\n <p>ghost</p>\n";
    const std::string before = a;
    const auto e = error_of([&] { apply_patch(a, parse_unified_diff(text)); });
    EXPECT_EQ(e.code(), ErrorCode::HunkRejected);
    ASSERT_TRUE(e.detail().index);
    EXPECT_EQ(*e.detail().index, 1u);
    EXPECT_EQ(a, before);
  }
}

TEST(Apply, AmbiguousMatch) {
  // Old side "x" sits at both expected-1 and expected+1.
  const std::string doc = "a\nx\nb\nx\nc\n";
  const auto d = parse_unified_diff("@@ -3 +3 @@\n-x\n+Y\n");
  const auto e = error_of([&] { apply_patch(doc, d); });
  EXPECT_EQ(e.code(), ErrorCode::HunkRejected);
  EXPECT_EQ(e.detail().field, "AMBIGUOUS_MATCH");
}

TEST(Apply, NearestOffsetWins) {
  const std::string doc = "x\na\nb\nc\nx\nd\n";
  // Expected at line 4 (c); x is at -3 and +1, so +1 wins.
  const auto out = apply_patch(doc, parse_unified_diff("@@ -4 +4 @@\n-x\n+Y\n"));
  EXPECT_EQ(out.new_document, "x\na\nb\nc\nY\nd\n");
  EXPECT_EQ(out.offsets, std::vector<long>{1});
}

TEST(Apply, AlreadyApplied) {
  const auto diff = parse_unified_diff("@@ -1,3 +1,3 @@\n a\n-b\n+B\n c\n");
  const auto once = apply_patch("a\nb\nc\n", diff).new_document;
  const auto e = error_of([&] { apply_patch(once, diff); });
  EXPECT_EQ(e.code(), ErrorCode::AlreadyApplied);
}

TEST(Apply, NoNewlineAtEndOfFile) {
  const std::string a = "one\ntwo\nthree";
  const std::string b = "one\ntwo\nthree\nfour\n";
  EXPECT_EQ(apply_patch(a, parse_unified_diff(reference_diff(a, b))).new_document, b);
  EXPECT_EQ(apply_patch(b, parse_unified_diff(reference_diff(b, a))).new_document, a);
}

TEST(Apply, CreateFromEmpty) {
  const std::string doc = "<html>\n<body></body>\n</html>\n";
  EXPECT_EQ(apply_patch("", parse_unified_diff(testing_support::create_document_diff(doc))).new_document, doc);
  EXPECT_EQ(apply_patch("", parse_unified_diff(reference_diff("", doc))).new_document, doc);
}

TEST(Apply, OffsetsNeverExceedWindow) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    const auto a = random_document(rng, 50);
    const auto b = random_edit(rng, a);
    const auto diff = parse_unified_diff(reference_diff(a, b));
    auto lines = testing_support::split_lines(a);
    const auto pad = rng() % 8;
    for (std::size_t k = 0; k < pad; ++k) lines.insert(lines.begin(), "pad" + std::to_string(k));
    const std::size_t window = rng() % 10;
    try {
      const auto out = apply_patch(join(lines), diff, window);
      for (long off : out.offsets) EXPECT_LE(static_cast<std::size_t>(std::abs(off)), window);
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::HunkRejected || e.code() == ErrorCode::AlreadyApplied);
    }
  }
}
