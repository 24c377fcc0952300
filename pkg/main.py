"""
Robust Localization Service
Batch HTTP surface for the robloc scenario commands
"""
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from api_layer import scenarios
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

app = FastAPI(
    title="Robust Localization",
    description="Exact robust-probability computations as batch scenario commands",
    version="0.1.0"
)

# Configure CORS - allow all origins by default
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(scenarios.router, prefix="/api", tags=["scenarios"])

@app.get("/")
async def root():
    return {
        "message": "Robust Localization",
        "endpoints": {
            "commands": "/api/scenarios/commands",
            "run": "/api/scenarios/{command}"
        }
    }

@app.get("/health")
async def health():
    return {"status": "healthy"}

if __name__ == "__main__":
    import uvicorn
    uvicorn.run("main:app", host="0.0.0.0", port=8000, reload=True)
