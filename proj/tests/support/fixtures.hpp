#pragma once

#include <string>
#include <vector>

#include "pitchside/ingest.hpp"

namespace fixture {

inline pitchside::TweetRecord tweet(std::string id, std::string user, std::string text,
                                    pitchside::TweetKind kind = pitchside::TweetKind::original,
                                    std::vector<std::string> hashtags = {},
                                    std::string target_tweet = {}, std::string target_user = {}) {
  pitchside::TweetRecord r;
  r.tweet_id = std::move(id);
  r.user_id = std::move(user);
  r.text = std::move(text);
  r.kind = kind;
  r.hashtags = std::move(hashtags);
  r.timestamp = *pitchside::parse_timestamp("2017-03-01T12:00:00Z");
  if (kind != pitchside::TweetKind::original) {
    r.target_tweet_id = std::move(target_tweet);
    r.target_user_id = target_user.empty() ? std::string("someone") : std::move(target_user);
  }
  return r;
}

inline pitchside::Lexicon lexicon() {
  return pitchside::Lexicon::make(
      std::vector<std::string>{"brexit", "ukip", "maga", "tcot", "labour"},
      std::vector<std::string>{"brexit", "tory", "corbyn", "labour"},
      std::vector<std::string>{"vote"});
}

}  // namespace fixture
