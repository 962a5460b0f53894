#pragma once

#include <string>
#include <string_view>

namespace rr {

// The four text signals scored separately. change takes (old,new) pairs;
// insert/remove/title take single strings.
enum class TextChannel { change, insert, remove, title };

std::string_view channel_name(TextChannel channel);
TextChannel channel_from_name(std::string_view name);

struct ChannelUnit {
  std::string text;      // insert/remove/title payload, or the new side of a change
  std::string old_text;  // only for the change channel

  static ChannelUnit single(std::string t) { return {std::move(t), {}}; }
  static ChannelUnit pair(std::string old_t, std::string new_t) {
    return {std::move(new_t), std::move(old_t)};
  }
};

}  // namespace rr
