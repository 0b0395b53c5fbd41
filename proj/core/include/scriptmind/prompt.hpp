#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

namespace scriptmind {

/// Text templates used for dataset rendering and judging. Placeholders are
/// written `{name}`. Defaults are compiled in; a directory holding any of
/// system.txt, user.txt, rationale.txt, judge.txt overrides them file by file,
/// so translated templates can be dropped in without rebuilding.
struct PromptTemplates {
  std::string system;     // detector system message
  std::string user;       // {conversation}
  std::string rationale;  // {current}, {next}
  std::string judge;      // {target}, {prediction}, {ground_truth}

  static PromptTemplates defaults();
  static PromptTemplates load(const std::filesystem::path& dir);
};

using Substitutions = std::initializer_list<std::pair<std::string_view, std::string_view>>;

/// Replaces each `{key}` in one left-to-right pass, so substituted values are
/// never rescanned. Unknown `{...}` spans are copied through.
std::string substitute(std::string_view tmpl, Substitutions values);

/// Resource directory: $SCRIPTMIND_RESOURCES if set, else the build-time default.
std::filesystem::path resource_dir();

}  // namespace scriptmind
