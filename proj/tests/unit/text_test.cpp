#include <gtest/gtest.h>

#include "pitchside/text.hpp"

namespace text = pitchside::text;

TEST(Fold, LowercasesAndCaseFolds) {
  EXPECT_EQ(text::fold("BREXIT"), "brexit");
  EXPECT_EQ(text::fold("Straße"), "strasse");
}

TEST(Fold, ComposesToNfc) {
  // "e" + combining acute accent becomes the precomposed character.
  EXPECT_EQ(text::fold("Cafe\xCC\x81"), "caf\xC3\xA9");
}

TEST(Fold, ReplacesInvalidUtf8) {
  EXPECT_EQ(text::fold("a\xFF" "b"), "a\xEF\xBF\xBD" "b");
}

TEST(NormalizeHashtag, StripsOneHashAndWhitespace) {
  EXPECT_EQ(text::normalize_hashtag("#MUFC"), "mufc");
  EXPECT_EQ(text::normalize_hashtag("  #GE2017 "), "ge2017");
  EXPECT_EQ(text::normalize_hashtag("\xEF\xBC\x83" "Brexit"), "brexit");
  EXPECT_EQ(text::normalize_hashtag("##x"), "#x");
}

TEST(NormalizeHashtag, RejectsEmpty) {
  EXPECT_FALSE(text::normalize_hashtag("#"));
  EXPECT_FALSE(text::normalize_hashtag("   "));
}

TEST(ContainsWord, RequiresBoundaries) {
  EXPECT_TRUE(text::contains_word("vote tory today", "tory"));
  EXPECT_TRUE(text::contains_word("tory!", "tory"));
  EXPECT_FALSE(text::contains_word("club history", "tory"));
  EXPECT_FALSE(text::contains_word("torys", "tory"));
  EXPECT_FALSE(text::contains_word("corbyn_fan", "corbyn"));
  EXPECT_TRUE(text::contains_word("corbyn", "corbyn"));
}

TEST(ContainsWord, FindsLaterOccurrenceAfterRejectedOne) {
  EXPECT_TRUE(text::contains_word("victory for the tory", "tory"));
}

TEST(ContainsWord, TreatsNonAsciiLettersAsWordCharacters) {
  EXPECT_FALSE(text::contains_word("\xC3\xA9tory", "tory"));
}
