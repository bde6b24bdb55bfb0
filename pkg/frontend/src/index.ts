/**
 * TypeScript client for the assocnet CLI.
 *
 * Every call shells out to the command-line tool and parses the artifacts it
 * writes (stats JSON, matrix TSV + sidecar, bias report JSON, stream JSON),
 * so results are numerically identical to direct CLI runs by construction.
 * No math is re-implemented here.
 */

import { execFile } from "node:child_process";
import { promisify } from "node:util";
import * as fs from "node:fs";
import * as path from "node:path";

const execFileAsync = promisify(execFile);

export type Approach = "stereotypes" | "valence" | "emotions";
export type Norm = "l1" | "l2";
export type CostMode = "inverse_weight" | "unit";

/** Prime/target configuration, in the CLI's spec-file schema. */
export interface PrimeSpecDoc {
  identity: string;
  approach: Approach;
  prime_pairs?: [string, string][];
  primes?: string[];
  targets?: Record<string, string[]>;
}

export interface DatasetOptions {
  /** Absolute path to the norms file. */
  norms: string;
  normsFormat: "trial" | "aggregated";
  vocabulary?: string;
  valenceLexicon?: string;
  emotionLexicon?: string;
  minWeight?: number;
}

export interface SpreadOverrides {
  retention?: number;
  steps?: number;
  initialActivation?: number;
}

export interface ClientOptions {
  /** Working directory for configs and artifacts (created if missing). */
  workDir: string;
  dataset: DatasetOptions;
  spread?: SpreadOverrides;
  /** Command to invoke the CLI; default ["python3", "-m", "assocnet"]. */
  command?: string[];
  /** Extra PYTHONPATH entry so `-m assocnet` resolves the core package. */
  pythonPath?: string;
}

export interface NetworkStats {
  nodeCount: number;
  edgeCount: number;
  density: number;
  averageDegree: number;
  diameter: number;
}

export interface Matrix {
  nodeLabels: string[];
  primeLabels: string[];
  /** Row-major: values[row][column], rows = nodes, columns = primes. */
  values: number[][];
  normalization: string;
}

export interface TestResultRow {
  label: string;
  statistic: number;
  zValue: number | null;
  pValue: number;
  effectSize: number;
  n: number;
  method: string;
  stars: string;
}

export interface BiasReport {
  identity: string;
  approach: Approach;
  normalization: string;
  results: TestResultRow[];
  coverage: Record<string, unknown>;
  coefficients?: { prime: string; coefficient: number; std_error: number }[];
  matrixSlice?: {
    primes: string[];
    targets: { name: string; set: string }[];
    values: number[][];
  };
}

export interface Stream {
  prime: string;
  target: string;
  costMode: CostMode;
  minCost: number;
  minCostExact: string;
  paths: string[][];
  hopLengths: number[];
  edges: [string, string, number][];
  truncated: boolean;
  dot: string;
}

export interface StreamRequest {
  prime: string;
  target: string;
  costMode?: CostMode;
  maxPaths?: number;
}

/** Error raised when the CLI exits nonzero; carries its exit code and stderr. */
export class AssocnetCliError extends Error {
  constructor(
    public readonly exitCode: number,
    public readonly stderr: string,
    args: string[],
  ) {
    super(`assocnet ${args[0]} failed (exit ${exitCode}): ${stderr.trim()}`);
    this.name = "AssocnetCliError";
  }
}

const NORM_TAGS: Record<Norm, string> = { l1: "l1_col_row", l2: "l2_col_row" };
const DEFAULT_NORMS: Record<Approach, Norm> = {
  stereotypes: "l2",
  valence: "l2",
  emotions: "l1",
};

function defaultPythonPath(): string {
  return path.resolve(__dirname, "..", "..", "..", "src");
}

export class AssocnetClient {
  private readonly workDir: string;
  private readonly outDir: string;
  private readonly command: string[];
  private readonly pythonPath: string;
  private readonly options: ClientOptions;
  private networkReady = false;

  constructor(options: ClientOptions) {
    this.options = options;
    this.workDir = path.resolve(options.workDir);
    this.outDir = path.join(this.workDir, "out");
    this.command = options.command ??
      (process.env.ASSOCNET_COMMAND?.split(" ") ?? ["python3", "-m", "assocnet"]);
    this.pythonPath =
      options.pythonPath ?? process.env.ASSOCNET_PYTHONPATH ?? defaultPythonPath();
    fs.mkdirSync(path.join(this.workDir, "specs"), { recursive: true });
  }

  /** Run a raw CLI invocation inside the client's working directory. */
  async runCli(args: string[]): Promise<string> {
    const [cmd, ...prefix] = this.command;
    try {
      const { stdout } = await execFileAsync(cmd, [...prefix, ...args], {
        cwd: this.workDir,
        env: {
          ...process.env,
          PYTHONPATH: this.pythonPath +
            (process.env.PYTHONPATH ? path.delimiter + process.env.PYTHONPATH : ""),
        },
        maxBuffer: 64 * 1024 * 1024,
      });
      return stdout;
    } catch (error) {
      const e = error as { code?: number; stderr?: string };
      if (typeof e.code === "number") {
        throw new AssocnetCliError(e.code, e.stderr ?? "", args);
      }
      throw error;
    }
  }

  private writeConfig(specFiles: string[]): string {
    const { dataset, spread } = this.options;
    const config: Record<string, unknown> = {
      norms: path.resolve(dataset.norms),
      norms_format: dataset.normsFormat,
      prime_specs: specFiles,
      min_weight: dataset.minWeight ?? 2,
      output_dir: this.outDir,
    };
    if (dataset.vocabulary) config.vocabulary = path.resolve(dataset.vocabulary);
    if (dataset.valenceLexicon) config.valence_lexicon = path.resolve(dataset.valenceLexicon);
    if (dataset.emotionLexicon) config.emotion_lexicon = path.resolve(dataset.emotionLexicon);
    if (spread?.retention !== undefined) config.retention = spread.retention;
    if (spread?.steps !== undefined) config.steps = spread.steps;
    if (spread?.initialActivation !== undefined) {
      config.initial_activation = spread.initialActivation;
    }
    const configPath = path.join(this.workDir, "client-config.json");
    fs.writeFileSync(configPath, JSON.stringify(config, null, 2) + "\n");
    return configPath;
  }

  private writeSpec(spec: PrimeSpecDoc): string {
    const specPath = path.join(this.workDir, "specs", `${spec.identity}.json`);
    fs.writeFileSync(specPath, JSON.stringify(spec, null, 2) + "\n");
    return specPath;
  }

  private readJson<T>(relative: string): T {
    return JSON.parse(
      fs.readFileSync(path.join(this.outDir, relative), "utf-8"),
    ) as T;
  }

  /** Build the network (cached) and return its statistics. */
  async buildNetwork(): Promise<{ stats: NetworkStats; networkPath: string }> {
    const config = this.writeConfig([]);
    await this.runCli(["stats", "--config", config]);
    this.networkReady = true;
    const raw = this.readJson<Record<string, number>>("network/stats.json");
    return {
      stats: {
        nodeCount: raw.node_count,
        edgeCount: raw.edge_count,
        density: raw.density,
        averageDegree: raw.average_degree,
        diameter: raw.diameter,
      },
      networkPath: path.join(this.outDir, "network", "network.tsv"),
    };
  }

  private async ensureNetwork(): Promise<void> {
    if (!this.networkReady) {
      await this.buildNetwork();
    }
  }

  private readMatrix(relative: string): Matrix {
    const text = fs.readFileSync(path.join(this.outDir, relative + ".tsv"), "utf-8");
    const lines = text.split("\n").filter((line) => line.length > 0);
    const header = lines[0].split("\t");
    const primeLabels = header.slice(1);
    const nodeLabels: string[] = [];
    const values: number[][] = [];
    for (const line of lines.slice(1)) {
      const cells = line.split("\t");
      nodeLabels.push(cells[0]);
      values.push(cells.slice(1).map(Number));
    }
    const sidecar = this.readJson<{ normalization: string }>(relative + ".json");
    return { nodeLabels, primeLabels, values, normalization: sidecar.normalization };
  }

  /** One diffusion per prime; returns the raw activation matrix. */
  async spreadBatch(primes: string[], id = "adhoc"): Promise<Matrix> {
    await this.ensureNetwork();
    const config = this.writeConfig([]);
    await this.runCli([
      "spread", "--config", config, "--primes", primes.join(","), "--id", id,
    ]);
    return this.readMatrix(`matrices/${id}.raw`);
  }

  /** Column-then-row normalization of a stored raw matrix. */
  async normalizeMatrix(id: string, norm: Norm): Promise<Matrix> {
    const config = this.writeConfig([]);
    await this.runCli(["normalize", "--config", config, "--id", id, "--norm", norm]);
    return this.readMatrix(`matrices/${id}.${NORM_TAGS[norm]}`);
  }

  private async evaluate(spec: PrimeSpecDoc, norm?: Norm): Promise<BiasReport> {
    await this.ensureNetwork();
    const specPath = this.writeSpec(spec);
    const config = this.writeConfig([specPath]);
    await this.runCli(["spread", "--config", config]);
    const args = ["bias", "--config", config];
    if (norm) args.push("--norm", norm);
    await this.runCli(args);
    const tag = NORM_TAGS[norm ?? DEFAULT_NORMS[spec.approach]];
    const doc = this.readJson<Record<string, unknown>>(
      `reports/${spec.identity}.${tag}.report.json`,
    );
    const results = (doc.results as Record<string, unknown>[]).map((r) => ({
      label: r.label as string,
      statistic: r.statistic as number,
      zValue: r.z_value as number | null,
      pValue: r.p_value as number,
      effectSize: r.effect_size as number,
      n: r.n as number,
      method: r.method as string,
      stars: r.stars as string,
    }));
    return {
      identity: doc.identity as string,
      approach: doc.approach as Approach,
      normalization: doc.normalization as string,
      results,
      coverage: doc.coverage as Record<string, unknown>,
      coefficients: doc.coefficients as BiasReport["coefficients"],
      matrixSlice: doc.matrix_slice as BiasReport["matrixSlice"],
    };
  }

  async stereotypeBias(spec: PrimeSpecDoc, norm?: Norm): Promise<BiasReport> {
    return this.evaluate({ ...spec, approach: "stereotypes" }, norm);
  }

  async valenceBias(spec: PrimeSpecDoc, norm?: Norm): Promise<BiasReport> {
    return this.evaluate({ ...spec, approach: "valence" }, norm);
  }

  async emotionBias(spec: PrimeSpecDoc, norm?: Norm): Promise<BiasReport> {
    return this.evaluate({ ...spec, approach: "emotions" }, norm);
  }

  /** Minimum-cost prime-to-target paths plus the rendered DOT text. */
  async extractStream(request: StreamRequest): Promise<Stream> {
    await this.ensureNetwork();
    const config = this.writeConfig([]);
    const costMode = request.costMode ?? "inverse_weight";
    const args = [
      "stream", "--config", config,
      "--prime", request.prime, "--target", request.target,
      "--cost-mode", costMode,
    ];
    if (request.maxPaths !== undefined) {
      args.push("--max-paths", String(request.maxPaths));
    }
    await this.runCli(args);
    const rel = `streams/${request.prime}--${request.target}.${costMode}`;
    const doc = this.readJson<Record<string, unknown>>(rel + ".json");
    return {
      prime: doc.prime as string,
      target: doc.target as string,
      costMode: doc.cost_mode as CostMode,
      minCost: doc.min_cost as number,
      minCostExact: doc.min_cost_exact as string,
      paths: doc.paths as string[][],
      hopLengths: doc.hop_lengths as number[],
      edges: doc.edges as [string, string, number][],
      truncated: doc.truncated as boolean,
      dot: fs.readFileSync(path.join(this.outDir, rel + ".dot"), "utf-8"),
    };
  }
}
