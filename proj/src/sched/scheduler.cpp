// Copyright 2026-present the relm project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relm/sched/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <queue>
#include <thread>
#include <unordered_map>

#include "relm/common/error.hpp"
#include "relm/common/tokens.hpp"
#include "relm/llm/prompt.hpp"

namespace relm {

int64_t SchedulerConfig::effective_token_budget(
    const std::string &system_prompt) const {
  if (token_budget > 0) return token_budget;
  return context_window_tokens - estimate_tokens(system_prompt);
}

InferenceRequest build_retry_request(const InferenceRequest &request) {
  InferenceRequest retry = request;
  retry.rendered_prompt +=
      "\n" + retry_clarification(request.contract.describe());
  retry.attempt += 1;
  return retry;
}

namespace {

struct RowState {
  InferenceRequest request;  // current attempt's form
  size_t input_index = 0;
  int attempts = 0;
  bool resolved = false;
  std::vector<size_t> followers;  // input indices sharing the dedup key
};

// One dispatched backend call covering member rows (indices into states).
struct Job {
  std::vector<size_t> rows;
  BatchClass cls = BatchClass::Unconstrained;
  InferenceRequest call;
  int64_t dispatch_time_us = 0;
  BackendResult result;
};

int64_t merge_busy_intervals(std::vector<std::pair<int64_t, int64_t>> spans) {
  if (spans.empty()) return 0;
  std::sort(spans.begin(), spans.end());
  int64_t busy = 0;
  int64_t cur_lo = spans[0].first, cur_hi = spans[0].second;
  for (size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first > cur_hi) {
      busy += cur_hi - cur_lo;
      cur_lo = spans[i].first;
      cur_hi = spans[i].second;
    } else {
      cur_hi = std::max(cur_hi, spans[i].second);
    }
  }
  return busy + (cur_hi - cur_lo);
}

bool is_transport_error(ErrorCode code) {
  return code == ErrorCode::Transport || code == ErrorCode::Timeout ||
         code == ErrorCode::BackendRefused;
}

// Shared control logic: coalescing, validation, retries, fan-out, ordering.
class RunContext {
 public:
  RunContext(const SchedulerConfig &config, Backend &backend,
             DedupCache *dedup, SchedulerMetrics &metrics,
             std::vector<InferenceRequest> requests)
      : config_(config),
        backend_(backend),
        dedup_(dedup),
        metrics_(metrics),
        inputs_(std::move(requests)) {
    outcomes_.resize(inputs_.size());
  }

  // Resolves cache hits, coalesces duplicates, forms the initial job queue.
  std::deque<Job> prepare() {
    metrics_.rows_submitted += static_cast<int64_t>(inputs_.size());
    std::unordered_map<uint64_t, size_t> leader_of;
    std::vector<size_t> leaders;
    for (size_t i = 0; i < inputs_.size(); ++i) {
      InferenceRequest &request = inputs_[i];
      outcomes_[i].tag = request.row_tag;
      if (request.constrained &&
          backend_.descriptor().dialect == ConstraintDialect::None) {
        ++metrics_.constraint_fallbacks;
      }
      uint64_t key = request.dedup_key;
      if (key != 0 && dedup_) {
        if (auto cached = dedup_->lookup(key)) {
          outcomes_[i].value = *cached;
          ++metrics_.dedup_hits;
          continue;
        }
        auto it = leader_of.find(key);
        if (it != leader_of.end()) {
          states_[it->second].followers.push_back(i);
          ++metrics_.dedup_hits;
          continue;
        }
        leader_of[key] = states_.size();
      }
      RowState state;
      state.request = request;
      state.input_index = i;
      states_.push_back(std::move(state));
      leaders.push_back(states_.size() - 1);
      ++unresolved_;
    }

    std::vector<InferenceRequest> leader_requests;
    leader_requests.reserve(leaders.size());
    for (size_t idx : leaders) leader_requests.push_back(states_[idx].request);
    AssembleOptions options;
    options.mode = config_.rows_per_request;
    options.token_budget = config_.effective_token_budget(
        leader_requests.empty() ? "" : leader_requests[0].system_prompt);
    AssembleResult assembled =
        assemble_batches(leader_requests, options, next_batch_id_);
    next_batch_id_ += static_cast<int64_t>(assembled.envelopes.size());
    metrics_.truncation_warnings += assembled.truncation_warnings;

    // Envelopes preserve arrival order, so member rows map back positionally.
    std::deque<Job> jobs;
    size_t cursor = 0;
    for (auto &envelope : assembled.envelopes) {
      Job job;
      job.cls = envelope.cls;
      for (size_t m = 0; m < envelope.requests.size(); ++m) {
        job.rows.push_back(leaders[cursor++]);
      }
      job.call = make_call(envelope);
      jobs.push_back(std::move(job));
    }
    return jobs;
  }

  InferenceRequest make_call(const BatchEnvelope &envelope) {
    if (envelope.requests.size() == 1) return envelope.requests[0];
    InferenceRequest call = envelope.requests[0];
    call.rendered_prompt = build_combined_prompt(envelope.requests);
    call.max_output_tokens = 0;
    for (const auto &member : envelope.requests) {
      call.max_output_tokens += member.max_output_tokens + 8;
    }
    return call;
  }

  void count_dispatch(Job &job) {
    ++metrics_.backend_calls;
    if (job.cls == BatchClass::Constrained) {
      ++metrics_.envelopes_constrained;
    } else {
      ++metrics_.envelopes_unconstrained;
    }
    for (size_t row : job.rows) {
      states_[row].attempts += 1;
      metrics_.max_attempts_per_row = std::max(
          metrics_.max_attempts_per_row,
          static_cast<int64_t>(states_[row].attempts));
    }
  }

  // Validates a completed job; returns retry jobs (always singletons).
  std::vector<Job> handle_completion(Job &job) {
    metrics_.prompt_tokens += job.result.usage.prompt_tokens;
    metrics_.output_tokens += job.result.usage.output_tokens;

    std::vector<Job> retries;
    if (job.rows.size() == 1) {
      if (auto retry = settle_row(job.rows[0], job.result.text)) {
        retries.push_back(std::move(*retry));
      }
      return retries;
    }

    auto entries = parse_combined_response(job.result.text);
    for (size_t m = 0; m < job.rows.size(); ++m) {
      const int ordinal = static_cast<int>(m) + 1;
      const std::string *answer = nullptr;
      for (const auto &[ord, text] : entries) {
        if (ord == ordinal) {
          answer = &text;
          break;
        }
      }
      // A missing line counts as a failed attempt for that row.
      std::optional<Job> retry =
          answer ? settle_row(job.rows[m], *answer)
                 : fail_or_retry(job.rows[m], "no output line for this row");
      if (retry) retries.push_back(std::move(*retry));
    }
    return retries;
  }

  // Returns a retry job when the row should be re-attempted.
  std::optional<Job> settle_row(size_t row, const std::string &raw) {
    RowState &state = states_[row];
    if (!config_.validate_outputs) {
      TypedValue v;
      v.kind = TypedValueKind::Text;
      v.text = raw;
      resolve(state, std::move(v));
      return std::nullopt;
    }
    try {
      TypedValue value = validate_output(state.request.contract, raw);
      if (state.request.dedup_key != 0 && dedup_) {
        dedup_->insert(state.request.dedup_key, value);
      }
      resolve(state, std::move(value));
      return std::nullopt;
    } catch (const EngineError &e) {
      if (e.code() != ErrorCode::Validation) throw;
      ++metrics_.validation_failures;
      return fail_or_retry(row, e.what());
    }
  }

  std::optional<Job> fail_or_retry(size_t row, const std::string &reason) {
    RowState &state = states_[row];
    if (state.attempts <= config_.max_retries) {
      ++metrics_.retries;
      state.request = build_retry_request(state.request);
      Job retry;
      retry.rows = {row};
      retry.cls = state.request.constrained ? BatchClass::Constrained
                                            : BatchClass::Unconstrained;
      retry.call = state.request;
      return retry;
    }
    if (config_.on_exhausted == OnExhausted::FailQuery) {
      throw EngineError(ErrorCode::QueryAborted,
                        "row failed after " + std::to_string(state.attempts) +
                            " attempts: " + reason);
    }
    state.resolved = true;
    --unresolved_;
    RowOutcome &outcome = outcomes_[state.input_index];
    outcome.nulled = true;
    outcome.attempts = state.attempts;
    ++metrics_.rows_nulled;
    for (size_t follower : state.followers) {
      outcomes_[follower].nulled = true;
      ++metrics_.rows_nulled;
    }
    return std::nullopt;
  }

  // Transport failure of a whole job: retry as-is or give up.
  std::optional<Job> transport_retry(Job &&job, const EngineError &error) {
    bool retryable = false;
    for (size_t row : job.rows) {
      if (states_[row].attempts <= config_.max_retries) retryable = true;
    }
    if (!retryable) {
      throw EngineError(ErrorCode::BackendDown,
                        std::string("backend unreachable after retries: ") +
                            error.what());
    }
    ++metrics_.retries;
    return std::move(job);
  }

  void resolve(RowState &state, TypedValue value) {
    state.resolved = true;
    --unresolved_;
    RowOutcome &outcome = outcomes_[state.input_index];
    outcome.value = value;
    outcome.attempts = state.attempts;
    for (size_t follower : state.followers) {
      outcomes_[follower].value = value;
    }
  }

  bool done() const { return unresolved_ == 0; }

  std::vector<RowOutcome> take_outcomes() { return std::move(outcomes_); }

  const SchedulerConfig &config_;
  Backend &backend_;
  DedupCache *dedup_;
  SchedulerMetrics &metrics_;
  std::vector<InferenceRequest> inputs_;
  std::vector<RowState> states_;
  std::vector<RowOutcome> outcomes_;
  int64_t next_batch_id_ = 0;
  int64_t unresolved_ = 0;
};

}  // namespace

std::vector<RowOutcome> Scheduler::run(std::vector<InferenceRequest> requests) {
  if (config_.window < 1) {
    throw EngineError(ErrorCode::Config, "scheduler window must be >= 1");
  }
  return config_.simulated_clock ? run_simulated(std::move(requests))
                                 : run_threaded(std::move(requests));
}

// Discrete-event execution over a virtual clock. The backend serves up to W
// envelopes concurrently; dispatching and validating occupy a serial virtual
// dispatcher, which is what leaves the backend idle between calls at W=1.
std::vector<RowOutcome> Scheduler::run_simulated(
    std::vector<InferenceRequest> requests) {
  RunContext ctx(config_, backend_, dedup_, metrics_, std::move(requests));
  std::deque<Job> pending = ctx.prepare();

  struct Completion {
    int64_t time;
    int64_t seq;
    bool operator>(const Completion &o) const {
      return std::tie(time, seq) > std::tie(o.time, o.seq);
    }
  };
  std::priority_queue<Completion, std::vector<Completion>, std::greater<>>
      events;
  std::unordered_map<int64_t, Job> in_service;
  std::vector<std::pair<int64_t, int64_t>> busy_spans;

  int64_t now = 0;
  int64_t dispatcher_free_at = 0;
  int64_t seq = 0;
  int in_flight = 0;
  int64_t last_activity = 0;

  auto dispatch_ready = [&]() {
    while (in_flight < config_.window && !pending.empty()) {
      Job job = std::move(pending.front());
      pending.pop_front();
      int64_t t0 = std::max(now, dispatcher_free_at);
      dispatcher_free_at = t0 + config_.sim_dispatch_us;
      job.dispatch_time_us = t0;
      auto sim = backend_.simulate(job.call);
      if (!sim) {
        throw EngineError(ErrorCode::Config,
                          "simulated clock requires a backend with a service "
                          "model; use the threaded scheduler for HTTP");
      }
      job.result = std::move(sim->result);
      int64_t complete = t0 + std::max<int64_t>(1, sim->service_us);
      busy_spans.emplace_back(t0, complete);
      ctx.count_dispatch(job);
      ++in_flight;
      metrics_.max_in_flight =
          std::max(metrics_.max_in_flight, static_cast<int64_t>(in_flight));
      in_service.emplace(seq, std::move(job));
      events.push({complete, seq});
      ++seq;
    }
  };

  dispatch_ready();
  while (!events.empty()) {
    Completion event = events.top();
    events.pop();
    now = event.time;
    Job job = std::move(in_service.at(event.seq));
    in_service.erase(event.seq);
    --in_flight;

    metrics_.envelope_latencies_us.push_back(now - job.dispatch_time_us);
    int64_t v0 = std::max(now, dispatcher_free_at);
    dispatcher_free_at =
        v0 + config_.sim_validate_us * static_cast<int64_t>(job.rows.size());
    last_activity = std::max(last_activity, dispatcher_free_at);

    for (auto &retry : ctx.handle_completion(job)) {
      pending.push_back(std::move(retry));
    }
    dispatch_ready();
  }

  if (!ctx.done()) {
    throw EngineError(ErrorCode::Internal,
                      "scheduler finished with unresolved rows");
  }
  metrics_.busy_us += merge_busy_intervals(std::move(busy_spans));
  metrics_.makespan_us += last_activity;
  return ctx.take_outcomes();
}

std::vector<RowOutcome> Scheduler::run_threaded(
    std::vector<InferenceRequest> requests) {
  RunContext ctx(config_, backend_, dedup_, metrics_, std::move(requests));
  std::deque<Job> pending = ctx.prepare();

  std::mutex mutex;
  std::condition_variable cv;
  int in_flight = 0;
  bool stop = false;
  std::exception_ptr fatal;
  std::vector<std::pair<int64_t, int64_t>> busy_spans;

  auto now_us = [] {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  };
  const int64_t start_us = now_us();

  auto worker = [&]() {
    std::unique_lock lock(mutex);
    while (true) {
      cv.wait(lock, [&] { return stop || !pending.empty(); });
      if (stop) return;
      Job job = std::move(pending.front());
      pending.pop_front();
      ctx.count_dispatch(job);
      ++in_flight;
      metrics_.max_in_flight =
          std::max(metrics_.max_in_flight, static_cast<int64_t>(in_flight));
      lock.unlock();

      int64_t t0 = now_us();
      std::optional<EngineError> transport_error;
      BackendResult result;
      try {
        result = backend_.invoke(job.call);
      } catch (const EngineError &e) {
        if (is_transport_error(e.code())) {
          transport_error = e;
        } else {
          lock.lock();
          fatal = std::current_exception();
          stop = true;
          cv.notify_all();
          continue;
        }
      }
      int64_t t1 = now_us();

      lock.lock();
      --in_flight;
      busy_spans.emplace_back(t0 - start_us, t1 - start_us);
      try {
        if (transport_error) {
          if (auto retry = ctx.transport_retry(std::move(job), *transport_error)) {
            pending.push_back(std::move(*retry));
            cv.notify_one();
          }
        } else {
          job.result = std::move(result);
          metrics_.envelope_latencies_us.push_back(t1 - t0);
          for (auto &retry : ctx.handle_completion(job)) {
            pending.push_back(std::move(retry));
            cv.notify_one();
          }
        }
      } catch (...) {
        fatal = std::current_exception();
        stop = true;
        cv.notify_all();
        continue;
      }
      if (ctx.done()) {
        stop = true;
        cv.notify_all();
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(config_.window));
  {
    std::lock_guard lock(mutex);
    if (pending.empty()) stop = true;
  }
  for (int i = 0; i < config_.window; ++i) threads.emplace_back(worker);
  {
    std::lock_guard lock(mutex);
    cv.notify_all();
  }
  for (auto &t : threads) t.join();

  if (fatal) std::rethrow_exception(fatal);
  if (!ctx.done()) {
    throw EngineError(ErrorCode::Internal,
                      "scheduler finished with unresolved rows");
  }
  metrics_.busy_us += merge_busy_intervals(std::move(busy_spans));
  metrics_.makespan_us += now_us() - start_us;
  metrics_.simulated_clock = false;
  return ctx.take_outcomes();
}

}  // namespace relm
