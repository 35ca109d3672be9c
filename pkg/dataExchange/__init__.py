from .datasetFile import impute_missing, load_dataset, record_to_series, save_dataset, series_to_record
from .reportTables import level_column, read_forecast_table, write_summary, write_table, write_yaml
from .tensorArchive import archive_paths, read_archive, write_archive
