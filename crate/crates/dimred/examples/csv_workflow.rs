//! Round-tripping a dataset through the CSV formats the binary speaks.
//!
//! Generates a sample, writes it to `data.csv`, loads it back, fits a
//! fold-then-refit estimator, and writes the two result files a `fit`
//! run would produce: the direction table and the summary-plot
//! coordinates. Everything lands in a temporary directory.
//!
//! Run with `cargo run --example csv_workflow`.

use std::fs::File;

use dimred::cli::csv_io::{load_csv, write_dataset, write_directions, write_essp, ResponseSelector};
use dimred::numerics::squared_projection_correlation;
use dimred::pipelines::{composed_transform_estimator, ComposedConfig, FoldTarget};
use dimred::simulation::{ModelId, ModelSpec};
use dimred::DirectionSet;

fn main() -> dimred::Result<()> {
    let dir = tempfile::tempdir().expect("temporary directory");

    // 1. Generate a sample from the even-link model and write it out.
    let spec = ModelSpec::new(ModelId::M2, 300, None, 19)?;
    let data = spec.generate()?;
    let response_name = "y".to_string();
    let predictor_names: Vec<String> = (1..=data.p()).map(|j| format!("x{j}")).collect();

    let data_path = dir.path().join("data.csv");
    write_dataset(
        File::create(&data_path).expect("create data.csv"),
        &response_name,
        &predictor_names,
        data.y(),
        data.x(),
    )?;
    println!("wrote {} ({} rows, {} predictors)", data_path.display(), data.n(), data.p());

    // 2. Load it back the way the binary would.
    let loaded = load_csv(&data_path, &ResponseSelector::parse("y"))?;
    println!(
        "loaded response '{}' with predictors {:?}",
        loaded.response_name,
        &loaded.predictor_names[..3.min(loaded.predictor_names.len())],
    );

    // 3. Fit: fold the responses along a refined axis, refit a slope.
    let config = ComposedConfig::iterated(FoldTarget::Response);
    let (direction, log) = composed_transform_estimator(&loaded.dataset, &config)?;
    let steps = log.map(|l| l.steps.len()).unwrap_or(0);
    let score = squared_projection_correlation(
        loaded.dataset.x(),
        &spec.betas[0],
        direction.as_vector(),
    )?;
    println!("fit converged after {steps} refinement step(s); alignment with truth = {score:.3}");

    // 4. Write the two result files a `fit` run produces.
    let directions_path = dir.path().join("directions.csv");
    let set = DirectionSet::new(vec![direction.clone()], vec![1.0])?;
    write_directions(
        File::create(&directions_path).expect("create directions.csv"),
        &loaded.predictor_names,
        &set,
    )?;

    let essp_path = dir.path().join("essp.csv");
    let projections = loaded.dataset.x() * direction.as_vector();
    write_essp(
        File::create(&essp_path).expect("create essp.csv"),
        &nalgebra::DMatrix::from_column_slice(loaded.dataset.n(), 1, projections.as_slice()),
        &loaded.response_name,
        loaded.dataset.y(),
    )?;

    for path in [&directions_path, &essp_path] {
        let text = std::fs::read_to_string(path).expect("read result file");
        let mut lines = text.lines();
        println!("\n{} ({} lines):", path.display(), text.lines().count());
        for line in lines.by_ref().take(3) {
            println!("  {line}");
        }
        println!("  ...");
    }

    println!("\nThe binary drives the same loop from a shell:");
    println!("  dimred simulate --model 2 --n 300 --method m2-it --reps 1 --seed 19");
    println!("  dimred fit --input data.csv --response y --method m2-it --out results");
    println!("  dimred transform --input data.csv --response y --method phd --what response --out folded");
    Ok(())
}
