#pragma once

#include "tuner/param_space.hpp"

namespace tuner {

// Built-in Hadoop space: 12 MapReduce/HDFS parameters with their stock
// defaults and tuning ranges. dfs.blocksize is carried in megabytes; config
// templates append the unit they need (e.g. "${dfs.blocksize}m").
inline ParameterSpace preset_hadoop() {
  std::vector<ParameterSpec> params;
  params.push_back({"mapreduce.map.memory.mb", IntRange{256, 3072, 256}, Value(std::int64_t{1024}),
                    true, 32.0, ""});
  params.push_back(
      {"dfs.blocksize", IntRange{32, 256, 32}, Value(std::int64_t{128}), true, 8.0, ""});
  params.push_back({"mapreduce.tasktracker.map.tasks.maximum", IntRange{2, 128, 16},
                    Value(std::int64_t{2}), false, std::nullopt, ""});
  params.push_back({"mapreduce.job.reduce.slowstart.completedmaps", FloatRange{0.025, 0.9, 0.1},
                    Value(0.05), false, std::nullopt, ""});
  params.push_back(
      {"mapreduce.map.output.compress", BoolDomain{}, Value(false), false, std::nullopt, ""});
  params.push_back(
      {"mapreduce.job.reduces", IntRange{1, 4, 1}, Value(std::int64_t{1}), false, std::nullopt, ""});
  params.push_back({"mapreduce.task.io.sort.mb", IntRange{32, 128, 16}, Value(std::int64_t{100}),
                    false, std::nullopt, ""});
  params.push_back(
      {"mapreduce.job.maps", IntRange{2, 32, 4}, Value(std::int64_t{2}), false, std::nullopt, ""});
  params.push_back({"mapreduce.task.io.sort.factor", IntRange{5, 80, 10}, Value(std::int64_t{10}),
                    false, std::nullopt, ""});
  params.push_back(
      {"dfs.replication", IntRange{1, 3, 1}, Value(std::int64_t{3}), false, std::nullopt, ""});
  params.push_back({"mapreduce.tasktracker.reduce.tasks.maximum", IntRange{2, 128, 16},
                    Value(std::int64_t{2}), false, std::nullopt, ""});
  params.push_back({"mapreduce.job.jvm.numtasks", IntRange{1, 1024, 128}, Value(std::int64_t{1}),
                    false, std::nullopt, ""});
  return ParameterSpace("hadoop", std::move(params));
}

// Built-in Spark space: 11 parameters. Byte-sized parameters carry their
// render suffix so "32" materializes as "32k" / "2m".
inline ParameterSpace preset_spark() {
  std::vector<ParameterSpec> params;
  params.push_back(
      {"spark.task.cpus", IntRange{1, 5, 1}, Value(std::int64_t{1}), true, std::nullopt, ""});
  params.push_back(
      {"spark.memory.storageFraction", FloatRange{0.25, 0.9, 0.1}, Value(0.5), true, 0.25, ""});
  params.push_back(
      {"spark.network.timeout", IntRange{40, 200, 20}, Value(std::int64_t{120}), true, 20.0, ""});
  params.push_back(
      {"spark.memory.fraction", FloatRange{0.25, 0.8, 0.1}, Value(0.6), false, std::nullopt, ""});
  params.push_back({"spark.shuffle.file.buffer", IntRange{16, 512, 64}, Value(std::int64_t{32}),
                    false, std::nullopt, "k"});
  params.push_back({"spark.scheduler.listenerbus.eventqueue.capacity", IntRange{2500, 25000, 2500},
                    Value(std::int64_t{10000}), false, std::nullopt, ""});
  params.push_back({"spark.files.openCostInBytes", IntRange{1048576, 16777216, 2097152},
                    Value(std::int64_t{4194304}), false, std::nullopt, ""});
  params.push_back({"spark.storage.memoryMapThreshold", IntRange{1, 5, 1}, Value(std::int64_t{2}),
                    false, std::nullopt, "m"});
  params.push_back({"spark.files.maxPartitionBytes", IntRange{33554432, 1073741824, 134217728},
                    Value(std::int64_t{134217728}), false, std::nullopt, ""});
  params.push_back({"spark.default.parallelism", IntRange{4, 24, 4}, Value(std::int64_t{24}), false,
                    std::nullopt, ""});
  params.push_back({"spark.scheduler.mode", EnumDomain{{"FIFO", "FAIR"}}, Value(std::string("FIFO")),
                    false, std::nullopt, ""});
  return ParameterSpace("spark", std::move(params));
}

// Named preset lookup used by the CLI.
inline ParameterSpace preset_by_name(const std::string& name) {
  if (name == "hadoop") return preset_hadoop();
  if (name == "spark") return preset_spark();
  throw ValidationError("unknown preset '" + name + "' (expected hadoop or spark)");
}

}  // namespace tuner
