#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "remix/annotation.hpp"
#include "remix/corpus.hpp"

namespace remix::session {

enum class CreatedBy { Chat, ApplyGlobal, ApplyLocal, ManualEdit };
enum class Mode { Chat, Search, Apply };

std::string_view created_by_name(CreatedBy c);
std::optional<CreatedBy> parse_created_by(std::string_view name);
std::string_view mode_name(Mode m);

struct DesignVersion {
  std::uint64_t version_id = 0;
  std::string document;
  CreatedBy created_by = CreatedBy::Chat;
  std::optional<std::uint64_t> parent_id;
  std::int64_t timestamp_ms = 0;  // unix epoch milliseconds

  friend bool operator==(const DesignVersion&, const DesignVersion&) = default;
};

struct Selection {
  std::string example_id;
  std::optional<Annotation> annotation;
};

struct Session {
  std::string session_id;
  std::vector<DesignVersion> versions;
  std::size_t cursor = 0;
  std::optional<Selection> selection;
  std::optional<std::string> target_component;
  Mode mode = Mode::Chat;
  std::vector<std::string> conversation;
  std::uint64_t next_version_id = 0;

  bool empty() const noexcept { return versions.empty(); }
  const DesignVersion& current() const { return versions.at(cursor); }
  /// Current document, or "" before the first commit.
  std::string current_document() const { return versions.empty() ? std::string() : current().document; }
  bool can_back() const noexcept { return !versions.empty() && cursor > 0; }
  bool can_forward() const noexcept { return !versions.empty() && cursor + 1 < versions.size(); }
};

struct NavigationResult {
  DesignVersion version;
  bool at_boundary = false;
};

/// Held for the duration of one mutating operation on a session; a second
/// concurrent mutator gets SESSION_BUSY instead of waiting.
class MutationLease {
 public:
  MutationLease() = default;
  explicit MutationLease(std::unique_lock<std::mutex> lock) : lock_(std::move(lock)) {}
  bool held() const noexcept { return lock_.owns_lock(); }

 private:
  std::unique_lock<std::mutex> lock_;
};

/// Owns all sessions. Reads take a short state lock and never wait on an
/// in-flight generation; writes to one session are serialized by leases.
/// With a journal path, every commit is appended as one JSON line and
/// replayed by open().
class SessionStore {
 public:
  SessionStore() = default;
  explicit SessionStore(std::filesystem::path journal);

  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  std::string create_session();
  bool exists(std::string_view session_id) const;
  Session snapshot(std::string_view session_id) const;
  std::vector<std::string> session_ids() const;

  /// Throws SESSION_NOT_FOUND or SESSION_BUSY.
  MutationLease acquire(std::string_view session_id);

  DesignVersion commit_version(std::string_view session_id, std::string document, CreatedBy created_by);
  NavigationResult undo(std::string_view session_id);
  NavigationResult redo(std::string_view session_id);

  /// Records the selection and switches to APPLY. Throws UNKNOWN_EXAMPLE_ID
  /// or INVALID_ANNOTATION.
  void select_for_apply(std::string_view session_id, const corpus::CorpusManifest& corpus,
                        std::string_view example_id, std::optional<Annotation> annotation,
                        std::optional<std::string> target_component);

  void set_mode(std::string_view session_id, Mode mode);
  void log_message(std::string_view session_id, std::string message);

 private:
  struct Slot {
    std::mutex busy;
    Session session;
  };

  std::shared_ptr<Slot> slot(std::string_view session_id) const;
  void append_journal(const Session& session, const DesignVersion& version);
  void replay_journal();

  mutable std::mutex mutex_;  // guards sessions_ and every Slot::session
  std::map<std::string, std::shared_ptr<Slot>, std::less<>> sessions_;
  std::optional<std::filesystem::path> journal_path_;
  std::ofstream journal_;
  std::uint64_t id_counter_ = 0;
};

}  // namespace remix::session
