import { test } from "node:test";
import assert from "node:assert/strict";
import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { AssocnetClient, AssocnetCliError, PrimeSpecDoc } from "../src/index";

const REPO_ROOT = path.resolve(__dirname, "..", "..", "..");
const TOY = path.join(REPO_ROOT, "tests", "fixtures", "toy");
const PYTHONPATH = path.join(REPO_ROOT, "src");

function tmpdir(name: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), `assocnet-${name}-`));
}

/** Direct CLI invocation, independent of the client implementation. */
function rawCli(cwd: string, args: string[]): string {
  return execFileSync("python3", ["-m", "assocnet", ...args], {
    cwd,
    env: { ...process.env, PYTHONPATH },
    encoding: "utf-8",
  });
}

function toyClient(workDir: string): AssocnetClient {
  return new AssocnetClient({
    workDir,
    dataset: {
      norms: path.join(TOY, "norms.tsv"),
      normsFormat: "aggregated",
      vocabulary: path.join(TOY, "vocabulary.txt"),
      valenceLexicon: path.join(TOY, "valence.tsv"),
      emotionLexicon: path.join(TOY, "emotions.tsv"),
    },
    pythonPath: PYTHONPATH,
  });
}

/** Two-node-path dataset whose two-step diffusion values are known exactly. */
function pathClient(workDir: string): AssocnetClient {
  const norms = path.join(workDir, "norms.tsv");
  fs.mkdirSync(workDir, { recursive: true });
  fs.writeFileSync(norms, "a\tb\t1\nb\tc\t1\n");
  return new AssocnetClient({
    workDir,
    dataset: { norms, normsFormat: "aggregated", minWeight: 1 },
    spread: { retention: 0.5, steps: 2, initialActivation: 3 },
    pythonPath: PYTHONPATH,
  });
}

const GENDER_SPEC: PrimeSpecDoc = {
  identity: "gender",
  approach: "stereotypes",
  prime_pairs: [
    ["woman", "man"],
    ["female", "male"],
    ["girl", "boy"],
    ["mother", "father"],
    ["feminine", "masculine"],
  ],
  targets: {
    female: ["warm", "gentle", "caring"],
    male: ["strong", "bold", "tough"],
  },
};

test("network stats equal a direct CLI run field-for-field", async () => {
  const client = toyClient(tmpdir("stats-client"));
  const { stats } = await client.buildNetwork();

  const cliDir = tmpdir("stats-cli");
  const config = {
    norms: path.join(TOY, "norms.tsv"),
    norms_format: "aggregated",
    vocabulary: path.join(TOY, "vocabulary.txt"),
    prime_specs: [],
    output_dir: path.join(cliDir, "out"),
  };
  const configPath = path.join(cliDir, "config.json");
  fs.writeFileSync(configPath, JSON.stringify(config));
  rawCli(cliDir, ["stats", "--config", configPath]);
  const expected = JSON.parse(
    fs.readFileSync(path.join(cliDir, "out", "network", "stats.json"), "utf-8"),
  );

  assert.equal(stats.nodeCount, expected.node_count);
  assert.equal(stats.edgeCount, expected.edge_count);
  assert.equal(stats.density, expected.density);
  assert.equal(stats.averageDegree, expected.average_degree);
  assert.equal(stats.diameter, expected.diameter);
});

test("spread on the three-node path reproduces the hand-computed vector", async () => {
  const client = pathClient(tmpdir("spread"));
  const matrix = await client.spreadBatch(["a"], "single");
  assert.deepEqual(matrix.nodeLabels, ["a", "b", "c"]);
  assert.deepEqual(matrix.primeLabels, ["a"]);
  assert.deepEqual(
    matrix.values.map((row) => row[0]),
    [1.125, 1.5, 0.375],
  );
  assert.equal(matrix.normalization, "raw");
});

test("normalizeMatrix applies column-then-row normalization", async () => {
  const client = pathClient(tmpdir("normalize"));
  await client.spreadBatch(["a", "c"], "pair");
  const normalized = await client.normalizeMatrix("pair", "l2");
  assert.equal(normalized.normalization, "l2_col_row");
  for (const row of normalized.values) {
    const norm = Math.hypot(...row);
    assert.ok(Math.abs(norm - 1) < 1e-12, `row norm ${norm}`);
  }
});

test("invalid prime surfaces the CLI's missing-prime error and exit code", async () => {
  const client = pathClient(tmpdir("missing"));
  await assert.rejects(
    client.spreadBatch(["zzz"]),
    (error: unknown) => {
      assert.ok(error instanceof AssocnetCliError);
      assert.equal(error.exitCode, 4);
      assert.match(error.message, /missing prime/);
      return true;
    },
  );
});

test("stereotype report equals the direct CLI artifact field-for-field", async () => {
  const client = toyClient(tmpdir("bias-client"));
  const report = await client.stereotypeBias(GENDER_SPEC);

  const cliDir = tmpdir("bias-cli");
  const specPath = path.join(cliDir, "gender.json");
  fs.writeFileSync(specPath, JSON.stringify(GENDER_SPEC));
  const config = {
    norms: path.join(TOY, "norms.tsv"),
    norms_format: "aggregated",
    vocabulary: path.join(TOY, "vocabulary.txt"),
    valence_lexicon: path.join(TOY, "valence.tsv"),
    emotion_lexicon: path.join(TOY, "emotions.tsv"),
    prime_specs: [specPath],
    output_dir: path.join(cliDir, "out"),
  };
  const configPath = path.join(cliDir, "config.json");
  fs.writeFileSync(configPath, JSON.stringify(config));
  rawCli(cliDir, ["run", "--config", configPath]);
  const expected = JSON.parse(
    fs.readFileSync(
      path.join(cliDir, "out", "reports", "gender.l2_col_row.report.json"),
      "utf-8",
    ),
  );

  assert.equal(report.identity, expected.identity);
  assert.equal(report.normalization, expected.normalization);
  assert.deepEqual(report.coverage, expected.coverage);
  assert.deepEqual(report.matrixSlice, expected.matrix_slice);
  assert.equal(report.results.length, expected.results.length);
  for (let i = 0; i < report.results.length; i++) {
    const got = report.results[i];
    const want = expected.results[i];
    assert.equal(got.label, want.label);
    assert.equal(got.statistic, want.statistic);
    assert.equal(got.zValue, want.z_value);
    assert.equal(got.pValue, want.p_value);
    assert.equal(got.effectSize, want.effect_size);
    assert.equal(got.n, want.n);
    assert.equal(got.method, want.method);
    assert.equal(got.stars, want.stars);
  }
});

test("valence and emotion evaluations return their report shapes", async () => {
  const client = toyClient(tmpdir("reports"));
  const valence = await client.valenceBias({
    identity: "religion",
    approach: "valence",
    primes: ["christian", "muslim", "buddhist"],
  });
  assert.equal(valence.results[0].label, "coefficients-equal");
  assert.equal(valence.coefficients?.length, 3);

  const emotions = await client.emotionBias({
    identity: "political",
    approach: "emotions",
    prime_pairs: [["democrat", "republican"]],
  });
  assert.equal(emotions.results.length, 8);
  assert.equal(emotions.normalization, "l1_col_row");

  const emotionsL2 = await client.emotionBias(
    {
      identity: "political",
      approach: "emotions",
      prime_pairs: [["democrat", "republican"]],
    },
    "l2",
  );
  assert.equal(emotionsL2.normalization, "l2_col_row");
  const signs = (r: { label: string; effectSize: number }[]) =>
    new Map(r.map((x) => [x.label, Math.sign(x.effectSize)]));
  const l1 = signs(emotions.results);
  const l2 = signs(emotionsL2.results);
  let disagreements = 0;
  for (const [label, sign] of l1) {
    if (l2.get(label) !== sign) disagreements += 1;
  }
  assert.ok(disagreements >= 1, "expected at least one sign flip between norms");
});

test("extractStream returns co-minimal paths plus DOT text", async () => {
  const client = toyClient(tmpdir("stream"));
  const stream = await client.extractStream({
    prime: "feminine",
    target: "warm",
    costMode: "inverse_weight",
  });
  assert.equal(stream.prime, "feminine");
  assert.equal(stream.target, "warm");
  assert.ok(stream.paths.length >= 1);
  for (const p of stream.paths) {
    assert.equal(p[0], "feminine");
    assert.equal(p[p.length - 1], "warm");
  }
  assert.match(stream.dot, /^graph mindset_stream \{/);
  assert.match(stream.dot, /"feminine"/);
});
