#include "remix/session.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>

#include <json.hpp>

#include "remix/error.hpp"
#include "remix/util.hpp"

namespace remix::session {

using nlohmann::json;

std::string_view created_by_name(CreatedBy c) {
  switch (c) {
    case CreatedBy::Chat: return "CHAT";
    case CreatedBy::ApplyGlobal: return "APPLY_GLOBAL";
    case CreatedBy::ApplyLocal: return "APPLY_LOCAL";
    case CreatedBy::ManualEdit: return "MANUAL_EDIT";
  }
  return "CHAT";
}

std::optional<CreatedBy> parse_created_by(std::string_view name) {
  for (auto c : {CreatedBy::Chat, CreatedBy::ApplyGlobal, CreatedBy::ApplyLocal, CreatedBy::ManualEdit}) {
    if (created_by_name(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Chat: return "CHAT";
    case Mode::Search: return "SEARCH";
    case Mode::Apply: return "APPLY";
  }
  return "CHAT";
}

namespace {

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

Error not_found(std::string_view id) {
  return Error(ErrorCode::SessionNotFound, "no session " + std::string(id), {.subject = std::string(id)});
}

// Linear history: committing drops everything after the parent.
void append_after_parent(Session& s, DesignVersion version) {
  if (!version.parent_id) {
    s.versions.clear();
  } else {
    const auto it = std::find_if(s.versions.begin(), s.versions.end(),
                                 [&](const DesignVersion& v) { return v.version_id == *version.parent_id; });
    if (it != s.versions.end()) s.versions.erase(it + 1, s.versions.end());
  }
  s.next_version_id = std::max(s.next_version_id, version.version_id + 1);
  s.versions.push_back(std::move(version));
  s.cursor = s.versions.size() - 1;
}

}  // namespace

SessionStore::SessionStore(std::filesystem::path journal) : journal_path_(std::move(journal)) {
  replay_journal();
  journal_.open(*journal_path_, std::ios::app | std::ios::binary);
  if (!journal_) throw Error(ErrorCode::IoError, "cannot open session journal " + journal_path_->string());
}

void SessionStore::replay_journal() {
  std::error_code ec;
  if (!std::filesystem::exists(*journal_path_, ec)) return;
  std::istringstream in(read_text_file(*journal_path_));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const json j = json::parse(line, nullptr, false);
    try {
      if (j.is_discarded() || !j.is_object()) throw std::runtime_error("not an object");
      DesignVersion v;
      v.version_id = j.at("version_id").get<std::uint64_t>();
      v.document = j.at("document").get<std::string>();
      const auto by = parse_created_by(j.at("created_by").get<std::string>());
      if (!by) throw std::runtime_error("bad created_by");
      v.created_by = *by;
      if (!j.at("parent_id").is_null()) v.parent_id = j.at("parent_id").get<std::uint64_t>();
      v.timestamp_ms = j.at("timestamp").get<std::int64_t>();
      const auto id = j.at("session_id").get<std::string>();
      auto& entry = sessions_[id];
      if (!entry) {
        entry = std::make_shared<Slot>();
        entry->session.session_id = id;
      }
      append_after_parent(entry->session, std::move(v));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ParseError,
                  "session journal line " + std::to_string(line_no) + ": " + e.what(), {.index = line_no});
    }
  }
}

void SessionStore::append_journal(const Session& s, const DesignVersion& v) {
  if (!journal_path_) return;
  json j = {{"session_id", s.session_id},
            {"version_id", v.version_id},
            {"created_by", created_by_name(v.created_by)},
            {"parent_id", v.parent_id ? json(*v.parent_id) : json(nullptr)},
            {"timestamp", v.timestamp_ms},
            {"document", v.document}};
  journal_ << j.dump() << '\n';
  journal_.flush();
  if (!journal_) throw Error(ErrorCode::IoError, "cannot append to session journal");
}

std::string SessionStore::create_session() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex_);
  std::string id;
  do {
    std::ostringstream os;
    os << "s" << std::hex << (rng() & 0xffffffffffffULL) << "-" << ++id_counter_;
    id = os.str();
  } while (sessions_.contains(id));
  auto s = std::make_shared<Slot>();
  s->session.session_id = id;
  sessions_.emplace(id, std::move(s));
  return id;
}

std::shared_ptr<SessionStore::Slot> SessionStore::slot(std::string_view session_id) const {
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw not_found(session_id);
  return it->second;
}

bool SessionStore::exists(std::string_view session_id) const {
  std::lock_guard lock(mutex_);
  return sessions_.find(session_id) != sessions_.end();
}

Session SessionStore::snapshot(std::string_view session_id) const {
  std::lock_guard lock(mutex_);
  return slot(session_id)->session;
}

std::vector<std::string> SessionStore::session_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

MutationLease SessionStore::acquire(std::string_view session_id) {
  std::shared_ptr<Slot> s;
  {
    std::lock_guard lock(mutex_);
    s = slot(session_id);
  }
  std::unique_lock busy(s->busy, std::try_to_lock);
  if (!busy.owns_lock()) {
    throw Error(ErrorCode::SessionBusy, "session " + std::string(session_id) + " has a mutation in flight",
                {.subject = std::string(session_id)});
  }
  return MutationLease(std::move(busy));
}

DesignVersion SessionStore::commit_version(std::string_view session_id, std::string document,
                                           CreatedBy created_by) {
  std::lock_guard lock(mutex_);
  auto& s = slot(session_id)->session;
  DesignVersion v;
  v.version_id = s.next_version_id;
  v.document = std::move(document);
  v.created_by = created_by;
  if (!s.versions.empty()) v.parent_id = s.versions[s.cursor].version_id;
  v.timestamp_ms = now_ms();
  append_journal(s, v);
  append_after_parent(s, v);
  return v;
}

NavigationResult SessionStore::undo(std::string_view session_id) {
  std::lock_guard lock(mutex_);
  auto& s = slot(session_id)->session;
  if (s.versions.empty()) throw Error(ErrorCode::EmptyHistory, "session has no versions");
  if (s.cursor == 0) return {s.versions[0], true};
  --s.cursor;
  return {s.versions[s.cursor], false};
}

NavigationResult SessionStore::redo(std::string_view session_id) {
  std::lock_guard lock(mutex_);
  auto& s = slot(session_id)->session;
  if (s.versions.empty()) throw Error(ErrorCode::EmptyHistory, "session has no versions");
  if (s.cursor + 1 >= s.versions.size()) return {s.versions[s.cursor], true};
  ++s.cursor;
  return {s.versions[s.cursor], false};
}

void SessionStore::select_for_apply(std::string_view session_id, const corpus::CorpusManifest& corpus,
                                    std::string_view example_id, std::optional<Annotation> annotation,
                                    std::optional<std::string> target_component) {
  if (!corpus.find(example_id)) {
    throw Error(ErrorCode::UnknownExampleId, "unknown example " + std::string(example_id),
                {.subject = std::string(example_id)});
  }
  if (annotation) annotation->validate();
  std::lock_guard lock(mutex_);
  auto& s = slot(session_id)->session;
  s.selection = Selection{std::string(example_id), std::move(annotation)};
  s.target_component = std::move(target_component);
  s.mode = Mode::Apply;
}

void SessionStore::set_mode(std::string_view session_id, Mode mode) {
  std::lock_guard lock(mutex_);
  slot(session_id)->session.mode = mode;
}

void SessionStore::log_message(std::string_view session_id, std::string message) {
  std::lock_guard lock(mutex_);
  slot(session_id)->session.conversation.push_back(std::move(message));
}

}  // namespace remix::session
